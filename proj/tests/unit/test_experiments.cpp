#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bornlab/experiments.hpp"

using namespace bornlab;

namespace {

DoubleSlitConfig small_config()
{
    DoubleSlitConfig c;
    c.x_range = {-32.0, 32.0};
    c.y_range = {-24.0, 24.0};
    c.nx = 256;
    c.ny = 128;
    c.x0 = -6.0;
    c.k0 = 3.0;
    c.slit_separation = 4.0;
    c.slit_width = 1.0;
    c.detector_x = 8.0;
    c.dt = 0.01;
    c.steps = 600;
    c.flux_stride = 4;
    c.bins = 32;
    return c;
}

} // namespace

TEST_CASE("histogram helpers")
{
    CHECK(count_maxima({0, 1, 0, 2, 0, 3, 0}, 0.0) == 3);
    CHECK(count_maxima({0, 1, 0, 2, 0, 3, 0}, 0.5) == 2);
    CHECK(count_maxima({0, 2, 2, 0}, 0.0) == 1);  // plateau
    CHECK(count_maxima({3, 2, 1}, 0.0) == 1);     // edge maximum
    CHECK(count_maxima({1, 1, 1}, 0.0) == 1);
    CHECK(count_maxima({}, 0.0) == 0);
    CHECK(l1_distance({0.5, 0.5}, {0.25, 0.75}) == doctest::Approx(0.5));
    CHECK(mirror_difference({0.1, 0.2, 0.7}, {0.7, 0.2, 0.1}) == 0.0);
    CHECK_THROWS_AS(l1_distance({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("double slit config validation")
{
    DoubleSlitConfig c = small_config();
    CHECK_NOTHROW(c.validate());
    c.detector_x = 0.5;  // inside the wall
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.bins = 30;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.steps = 601;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.x0 = 2.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("coarse double slit run")
{
    const DoubleSlitConfig c = small_config();
    const auto r = run_double_slit(c);
    CHECK(r.mirror_difference <= 1e-3);
    for (const auto* h : {&r.both, &r.left, &r.right}) {
        CHECK(std::abs(h->mass_balance - 1.0) <= 1e-3);
        double s = 0.0;
        for (double m : h->mass_per_bin) {
            CHECK(m >= 0.0);
            s += m;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(h->bin_edges.size() == c.bins + 1);
    }
    CHECK(r.distance > 0.05);
    CHECK(r.double_maxima > r.mixture_maxima);

    // identical configuration, identical output
    const auto again = run_slit(c, SlitSelection::both);
    CHECK(l1_distance(again.mass_per_bin, r.both.mass_per_bin) == 0.0);

    DoubleSlitConfig early = c;
    early.steps = 40;
    CHECK_THROWS_AS(run_slit(early, SlitSelection::both), std::runtime_error);
}

TEST_CASE("moment table for eigenstates")
{
    const Model ho = harmonic_model(1.0, 1, 1, {1.0});
    const Grid g = Grid::make({{-10, 10}}, {256});
    const auto t = moment_divergence_report(harmonic_eigenstate({3}, 1.0, ho), ho, g, 4);
    for (int k = 1; k <= 4; ++k) {
        const auto& row = t.find("energy", k);
        CHECK(row.abs_diff <= 1e-8 * std::max(1.0, std::abs(row.qm)));
        CHECK(row.qm == doctest::Approx(std::pow(3.5, k)));
        CHECK(t.find("position[0]", k).abs_diff <= 1e-9);
    }
    CHECK_THROWS_AS(moment_divergence_report(harmonic_eigenstate({3}, 1.0, ho), ho, g, 0), std::invalid_argument);
    CHECK_THROWS_AS(t.find("energy", 9), std::out_of_range);

    const Model coulomb = coulomb_model();
    const Grid g3 = Grid::make({{-16, 16}, {-16, 16}, {-16, 16}}, {32, 32, 32});
    const auto h = moment_divergence_report(hydrogen_state(2, 1, 1), coulomb, g3, 4);
    for (int k = 1; k <= 4; ++k) {
        const auto& row = h.find("energy", k);
        CHECK(row.abs_diff <= 1e-8 * std::max(1.0, std::abs(row.qm)));
    }
}

TEST_CASE("HO (0,2) superposition diverges at k = 2")
{
    const Model ho = harmonic_model(1.0, 1, 1, {1.0});
    const Grid g = Grid::make({{-10, 10}}, {256});
    const auto s = superpose({1.0, 1.0}, {harmonic_eigenstate({0}, 1.0, ho), harmonic_eigenstate({2}, 1.0, ho)});
    const auto t = moment_divergence_report(s, ho, g, 4, std::numbers::pi / 4);
    CHECK(t.find("energy", 1).abs_diff <= 1e-10);
    const auto& k2 = t.find("energy", 2);
    CHECK(k2.qm == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(k2.qm_source == "closed-form");
    CHECK(std::abs((k2.qm - k2.kolmogorov) - 0.53377152672426429) <= 1e-6);
    for (int k = 1; k <= 4; ++k) CHECK(t.find("position[0]", k).abs_diff <= 1e-9);

    // the real superposition at t = 0 has no gap
    const auto t0 = moment_divergence_report(s, ho, g, 2, 0.0);
    CHECK(t0.find("energy", 2).abs_diff <= 1e-8);
}

TEST_CASE("moment table for states without eigen decomposition")
{
    const Model free1 = free_model(1, 1, {1.0});
    const Grid g = Grid::make({{-20, 20}}, {512});
    const auto t = moment_divergence_report(gaussian_packet({0.5}, 1.0, {1.2}, free1), free1, g, 3);
    CHECK(t.find("energy", 1).abs_diff <= 1e-10);
    CHECK(t.find("energy", 2).qm_source == "grid");
    CHECK(t.find("momentum[0]", 1).abs_diff <= 1e-10);
    // <p^2> exceeds E[(m v)^2] by m^2 E[u^2] = hbar^2 / (4 sigma^2)
    CHECK(t.find("momentum[0]", 2).qm - t.find("momentum[0]", 2).kolmogorov == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("uncertainty report")
{
    const Model free1 = free_model(1, 1, {1.0});
    const Grid g = Grid::make({{-20, 20}}, {512});
    const auto still = uncertainty_report(gaussian_packet({0.0}, 1.3, {0.0}, free1).sample(g), free1, 0);
    CHECK(std::abs(still[0].qm_product - 0.5) <= 1e-6);

    const auto moving = uncertainty_report(gaussian_packet({0.0}, 1.3, {2.0}, free1).sample(g), free1, 0);
    CHECK(moving[0].m_sigma_v <= 1e-8);
    CHECK(std::abs(moving[0].m_sigma_u * moving[0].m_sigma_u - 1.0 / (4 * 1.3 * 1.3)) <= 1e-6);
    CHECK(moving[0].decomposition_relative <= 1e-6);

    const Model ho = harmonic_model(1.0, 1, 1, {1.0});
    const Grid gh = Grid::make({{-10, 10}}, {256});
    const auto real = uncertainty_report(harmonic_eigenstate({1}, 1.0, ho).sample(gh), ho, 0);
    CHECK(real[0].drift_product == 0.0);
    CHECK(real[0].qm_product >= 0.5);
    CHECK(real[0].decomposition_residual <= 1e-8);
}
