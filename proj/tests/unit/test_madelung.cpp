#include "doctest.h"

#include <cmath>

#include "bornlab/catalog.hpp"
#include "bornlab/madelung.hpp"
#include "bornlab/propagator.hpp"

using namespace bornlab;

namespace {

std::array<ComplexField, 3> analytic_triple(const CatalogState& s, const Grid& g, double t, double dt)
{
    return {s.sample(g, t - dt), s.sample(g, t), s.sample(g, t + dt)};
}

CatalogState ho_mix(const Model& model)
{
    return superpose({1.0, Complex(0, 1), 0.5}, {harmonic_eigenstate({0}, 1.0, model), harmonic_eigenstate({1}, 1.0, model),
                                                 harmonic_eigenstate({2}, 1.0, model)});
}

} // namespace

TEST_CASE("eigenstates are stationary solutions")
{
    const Model ho = harmonic_model(1.0, 1, 1, {1.0});
    const Grid g = Grid::make({{-10, 10}}, {256});
    const auto s = harmonic_eigenstate({2}, 1.0, ho);
    CHECK(continuity_residual(analytic_triple(s, g, 0.5, 0.05), 0.05, ho).norm_l2 <= 1e-10);
    CHECK(force_residual(analytic_triple(s, g, 0.5, 0.05), 0.05, ho, 0).norm_l2 <= 1e-6);

    const Model coulomb = coulomb_model();
    const Grid g3 = Grid::make({{-12, 12}, {-12, 12}, {-12, 12}}, {32, 32, 32});
    const auto h = hydrogen_state(2, 0, 0);
    CHECK(continuity_residual(analytic_triple(h, g3, 1.0, 0.1), 0.1, coulomb).norm_l2 <= 1e-10);
    CHECK(force_residual(analytic_triple(h, g3, 1.0, 0.1), 0.1, coulomb, 0).norm_l2 <= 1e-6);
}

TEST_CASE("closed-form oracle states satisfy all three equations")
{
    const Model free1 = free_model(1, 1, {1.3});
    const Grid g1 = Grid::make({{-20, 20}}, {512});
    const auto packet = gaussian_packet({-2.0}, 1.0, {1.5}, free1);
    for (double t : {0.0, 0.7}) {
        CHECK(continuity_residual_exact(packet.sample(g1, t), free1).norm_l2 <= 1e-8);
        CHECK(force_residual_exact(packet.sample(g1, t), free1, 0).norm_l2 <= 1e-8);
    }

    const Model two = free_model(2, 1, {1.0, 2.0});
    const Grid g2 = Grid::make({{-15, 15}, {-15, 15}}, {128, 128});
    const auto pair = gaussian_packet({-2.0, 1.0}, 1.0, {1.5, -0.5}, two);
    const ComplexField f2 = pair.sample(g2, 0.7);
    CHECK(continuity_residual_exact(f2, two).norm_l2 <= 1e-8);
    CHECK(force_residual_exact(f2, two, 0).norm_l2 <= 1e-8);
    CHECK(force_residual_exact(f2, two, 1).norm_l2 <= 1e-8);
    CHECK(vorticity_residual(f2, two).norm_max <= 1e-8);

    const Model ho = harmonic_model(1.0, 1, 1, {1.0});
    const Grid g = Grid::make({{-10, 10}}, {256});
    const ComplexField mix = ho_mix(ho).sample(g, 0.3);
    CHECK(continuity_residual_exact(mix, ho).norm_l2 <= 1e-8);
    CHECK(force_residual_exact(mix, ho, 0).norm_l2 <= 1e-8);

    const Model coulomb = coulomb_model();
    const Grid g3 = Grid::make({{-10, 10}, {-10, 10}, {-10, 10}}, {32, 32, 32});
    const ComplexField h = hydrogen_state(2, 1, 1).sample(g3, 0.3);
    CHECK(continuity_residual_exact(h, coulomb).norm_l2 <= 1e-8);
    CHECK(force_residual_exact(h, coulomb, 0).norm_l2 <= 1e-8);

    ComplexField bare = packet.sample(g1, 0.7);
    bare.drop_backing();
    CHECK_THROWS_AS(continuity_residual_exact(bare, free1), std::invalid_argument);
}

TEST_CASE("residuals are invariant under a global phase")
{
    const Model ho = harmonic_model(1.0, 1, 1, {1.0});
    const Grid g = Grid::make({{-10, 10}}, {256});
    const auto s = ho_mix(ho);
    auto tri = analytic_triple(s, g, 0.3, 0.02);
    const auto a = force_residual(tri, 0.02, ho, 0);
    for (auto& f : tri) f = f.scaled(std::polar(1.0, 1.1));
    const auto b = force_residual(tri, 0.02, ho, 0);
    CHECK(b.norm_l2 == doctest::Approx(a.norm_l2).epsilon(1e-8));
    const auto c = continuity_residual(tri, 0.02, ho);
    CHECK(c.norm_l2 > 0.0);
}

TEST_CASE("analytic snapshots converge at second order in dt")
{
    const Model ho = harmonic_model(1.0, 1, 1, {1.0});
    const auto s = ho_mix(ho);
    const SnapshotBuilder build = [&](const Resolution& r) {
        return analytic_triple(s, Grid::make({{-10, 10}}, {r.points}), 0.3, r.dt);
    };
    const std::vector<Resolution> res{{256, 0.04}, {256, 0.02}, {256, 0.01}};
    const auto c = convergence_study(ho, build, res, ResidualEquation::continuity);
    REQUIRE(c.order);
    CHECK(*c.order >= 1.8);
    const auto f = convergence_study(ho, build, res, ResidualEquation::force);
    REQUIRE(f.order);
    CHECK(*f.order >= 1.8);
}

TEST_CASE("split-step free gaussian converges at order two")
{
    const Model free1 = free_model(1, 1, {1.0});
    const auto packet = gaussian_packet({-3.0}, 1.0, {1.0}, free1);
    const SnapshotBuilder build = [&](const Resolution& r) {
        const Grid g = Grid::make({{-20, 20}}, {r.points});
        ComplexField f0 = packet.sample(g);
        f0.drop_backing();
        return split_step_triple(f0, free1, r.dt, 1.0);
    };
    const std::vector<Resolution> res{{128, 0.04}, {256, 0.02}, {512, 0.01}};
    for (auto eq : {ResidualEquation::continuity, ResidualEquation::force}) {
        const auto study = convergence_study(free1, build, res, eq);
        REQUIRE(study.order);
        CHECK(std::abs(*study.order - 2.0) <= 0.3);
        CHECK(study.reports[1].norm_l2 <= 1e-3);
    }
}

TEST_CASE("vorticity")
{
    const Model free2 = free_model(1, 2, {1.0});
    const Grid g2 = Grid::make({{-12, 12}, {-12, 12}}, {128, 128});
    CHECK(vorticity_residual(gaussian_packet({0.5, 0.0}, 1.0, {1.2, -0.7}, free2).sample(g2), free2).norm_max <= 1e-10);
    ComplexField bare = gaussian_packet({0.5, 0.0}, 1.0, {1.2, -0.7}, free2).sample(g2);
    bare.drop_backing();
    CHECK(vorticity_residual(bare, free2).norm_max <= 1e-10);

    const Model coulomb = coulomb_model();
    const Grid g3 = Grid::make({{-10, 10}, {-10, 10}, {-10, 10}}, {32, 32, 32});
    CHECK(vorticity_residual(hydrogen_state(2, 1, 1).sample(g3), coulomb).norm_max <= 1e-6);

    const double mass = 1.7;
    const Model heavy = free_model(1, 3, {mass});
    const auto rot = VelocityGradient::from_function(g3, [](std::span<const double>, std::span<double> j) {
        // v = (-y, x, 0)
        std::fill(j.begin(), j.end(), 0.0);
        j[0 * 3 + 1] = -1.0;
        j[1 * 3 + 0] = 1.0;
    });
    CHECK(std::abs(vorticity_residual(rot, heavy).norm_max - 2.0 * mass) <= 1e-10);

    const Model one = free_model(1, 1, {1.0});
    const Grid g1 = Grid::make({{-10, 10}}, {64});
    CHECK(vorticity_residual(gaussian_packet({0.0}, 1.0, {1.0}, one).sample(g1), one).norm_max == 0.0);
}

TEST_CASE("convergence study inputs")
{
    const Model free2 = free_model(1, 2, {1.0});
    const auto packet = gaussian_packet({0.5, 0.0}, 1.0, {1.2, -0.7}, free2);
    const SnapshotBuilder build = [&](const Resolution& r) {
        const Grid g = Grid::make({{-12, 12}, {-12, 12}}, {r.points, r.points});
        const ComplexField f = packet.sample(g);
        return std::array<ComplexField, 3>{f, f, f};
    };
    const auto v = convergence_study(free2, build, {{32, 0.1}, {64, 0.1}, {128, 0.1}}, ResidualEquation::vorticity);
    CHECK(v.saturated);
    CHECK_FALSE(v.order);
    CHECK_THROWS_AS(convergence_study(free2, build, {{32, 0.1}}, ResidualEquation::vorticity), std::invalid_argument);
    CHECK_THROWS_AS(convergence_study(free2, build, {{32, 0.1}, {64, 0.1}, {256, 0.1}}, ResidualEquation::vorticity),
                    std::invalid_argument);
}

TEST_CASE("snapshot validation")
{
    const Model free1 = free_model(1, 1, {1.0});
    const auto packet = gaussian_packet({0.0}, 1.0, {1.0}, free1);
    const Grid a = Grid::make({{-10, 10}}, {64});
    const Grid b = Grid::make({{-10, 10}}, {128});
    const std::array<ComplexField, 3> mixed{packet.sample(a), packet.sample(b), packet.sample(a)};
    CHECK_THROWS_AS(continuity_residual(mixed, 0.1, free1), std::invalid_argument);
    const std::array<ComplexField, 3> ok{packet.sample(a), packet.sample(a), packet.sample(a)};
    CHECK_THROWS_AS(continuity_residual(ok, 0.0, free1), std::invalid_argument);
    const auto rep = continuity_residual(ok, 0.1, free1);
    CHECK(rep.masked_fraction >= 0.0);
    CHECK(rep.reliable == (rep.masked_fraction < 0.2));
    CHECK(to_string(ResidualEquation::force) == "force");
    CHECK(residual_equation_from_string("vorticity") == ResidualEquation::vorticity);
}
