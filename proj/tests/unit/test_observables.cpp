#include "doctest.h"

#include <cmath>

#include "bornlab/calculus.hpp"
#include "bornlab/catalog.hpp"
#include "bornlab/model.hpp"
#include "bornlab/observables.hpp"
#include "bornlab/probability.hpp"

using namespace bornlab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

template <class F>
double max_over_mask(const RandomVariable& rv, std::size_t comp, F&& expected)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < rv.grid.size(); ++i) {
        if (!rv.mask[i]) continue;
        worst = std::max(worst, std::abs(rv.components[comp][i] - expected(i)));
    }
    return worst;
}

Grid cube(double half, std::size_t n) { return Grid::make({{-half, half}, {-half, half}, {-half, half}}, {n, n, n}); }

} // namespace

TEST_CASE("hydrogen 211 drift velocity at (1, 0, 0)")
{
    const Model model = coulomb_model();
    // cell centers at -1, 0, 1, 2 on each axis
    const Grid g = Grid::make({{-1.5, 2.5}, {-1.5, 2.5}, {-1.5, 2.5}}, {4, 4, 4});
    const auto v = drift_velocity(hydrogen_state(2, 1, 1).sample(g), model, 0);
    const double p[] = {1.0, 0.0, 0.0};
    const std::size_t i = g.locate(p);
    REQUIRE(v.mask[i]);
    CHECK(std::abs(v.components[0][i]) <= 1e-12);
    CHECK(v.components[1][i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(v.components[2][i]) <= 1e-12);
}

TEST_CASE("hydrogen fields are constant")
{
    const Model model = coulomb_model();
    const Grid g = cube(10.0, 32);
    for (auto [n, l, m] : {std::array{1, 0, 0}, {2, 1, 0}, {2, 1, 1}, {2, 1, -1}}) {
        const ComplexField f = hydrogen_state(n, l, m).sample(g);
        const double en = -0.5 / (n * n);
        const auto e = energy_rv(f, model);
        CHECK(max_over_mask(e, 0, [&](std::size_t) { return en; }) <= 1e-6 * std::abs(en));
        const auto lz = angular_momentum(f, model, 0, {0.0, 0.0, 0.7});
        CHECK(max_over_mask(lz, 2, [&](std::size_t) { return static_cast<double>(m); }) <= 1e-6);
        const auto q = quantum_potential(f, model);
        if (l == 0) {
            double worst = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!q.mask[i]) continue;
                const auto pt = g.point(i);
                worst = std::max(worst, std::abs(q.values[i] - 1.0 / std::hypot(pt[0], pt[1], pt[2]) - en));
            }
            CHECK(worst <= 1e-6);
        }
    }
    CHECK(qm_energy_expect(hydrogen_state(1, 0, 0).sample(g), model) == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("real states have zero drift")
{
    const Model model = harmonic_model(1.0, 1, 1, {1.0});
    const Grid g = Grid::make({{-10, 10}}, {256});
    const ComplexField f = harmonic_eigenstate({3}, 1.0, model).sample(g);
    const auto v = drift_velocity(f, model, 0);
    CHECK(max_over_mask(v, 0, [](std::size_t) { return 0.0; }) == 0.0);
    CHECK(std::abs(qm_momentum_expect(f, model, 0)[0]) <= 1e-10);
    const auto h = hydrogen_state(2, 1, 0).sample(cube(10.0, 16));
    const auto l = angular_momentum(h, coulomb_model(), 0, {0.0, 0.0, 0.0});
    for (std::size_t c = 0; c < 3; ++c) CHECK(max_over_mask(l, c, [](std::size_t) { return 0.0; }) == 0.0);
}

TEST_CASE("gaussian drift, osmotic velocity and quantum potential")
{
    const double hbar = 1.0, mass = 1.3, sigma = 0.9, k0 = 1.7;
    const Model model = free_model(1, 1, {mass}, hbar);
    const Grid g = Grid::make({{-15, 15}}, {512});
    const ComplexField f = gaussian_packet({0.0}, sigma, {k0}, model).sample(g);

    const auto v = drift_velocity(f, model, 0);
    CHECK(max_over_mask(v, 0, [&](std::size_t) { return hbar * k0 / mass; }) <= 1e-8);

    const auto u = osmotic_velocity(f, model, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!u.mask[i]) continue;
        const double x = g.coordinate(0, i);
        const double ex = -hbar * x / (2 * mass * sigma * sigma);
        worst = std::max(worst, rel(u.components[0][i], ex));
    }
    CHECK(worst <= 1e-8);
    CHECK(std::abs(expectation(u, born_measure(f))[0]) <= 1e-8);

    const RealField q = quantum_potential(f, model);
    worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!q.mask[i]) continue;
        const double x = g.coordinate(0, i);
        const double ex = -(hbar * hbar / (2 * mass)) * (x * x / (4 * std::pow(sigma, 4)) - 1 / (2 * sigma * sigma));
        worst = std::max(worst, rel(q.values[i], ex));
    }
    CHECK(worst <= 1e-8);

    const auto p = qm_momentum_expect(f, model, 0);
    CHECK(std::abs(p[0].real() - hbar * k0) <= 1e-8);
    CHECK(std::abs(p[0].imag()) <= 1e-10);
}

TEST_CASE("spectral and closed-form derivatives agree on resolved states")
{
    const Model model = free_model(1, 1, {1.0});
    const Grid g = Grid::make({{-15, 15}}, {512});
    const ComplexField f = gaussian_packet({0.3}, 1.0, {1.2}, model).sample(g);
    ComplexField bare = f;
    bare.drop_backing();
    const auto va = drift_velocity(f, model, 0);
    const auto vs = drift_velocity(bare, model, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(0, i);
        if (std::abs(x - 0.3) < 6.0) worst = std::max(worst, std::abs(va.components[0][i] - vs.components[0][i]));
    }
    CHECK(worst <= 1e-8);
    CHECK(qm_energy_expect(bare, model) == doctest::Approx(qm_energy_expect(f, model)).epsilon(1e-10));
}

TEST_CASE("flat density gives zero osmotic velocity and quantum potential")
{
    const Model model = free_model(1, 1, {1.0});
    const Grid g = Grid::make({{0, 10}}, {64});
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        v[i] = std::polar(1.0 / std::sqrt(10.0), 2 * std::numbers::pi * g.coordinate(0, i) / 10.0);
    const ComplexField f(g, v);
    const auto u = osmotic_velocity(f, model, 0);
    CHECK(max_over_mask(u, 0, [](std::size_t) { return 0.0; }) <= 1e-12);
    const RealField q = quantum_potential(f, model);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(q.values[i]) <= 1e-10);
    const auto d = drift_velocity(f, model, 0);
    CHECK(max_over_mask(d, 0, [](std::size_t) { return 2 * std::numbers::pi / 10.0; }) <= 1e-12);
}

TEST_CASE("harmonic energies")
{
    const double omega = 1.4;
    const Model model = harmonic_model(omega, 1, 1, {1.0});
    const Grid g = Grid::make({{-10, 10}}, {256});
    for (int n = 0; n <= 4; ++n) {
        const ComplexField f = harmonic_eigenstate({n}, omega, model).sample(g);
        const auto e = energy_rv(f, model);
        const double en = omega * (n + 0.5);
        CHECK(max_over_mask(e, 0, [&](std::size_t) { return en; }) <= 1e-8);
        const auto m = born_measure(f);
        CHECK(expectation(e, m, 2, true)[0] <= 1e-10 * en * en);
    }
    CHECK(qm_energy_expect(harmonic_eigenstate({0}, omega, model).sample(g), model)
          == doctest::Approx(omega / 2).epsilon(1e-8));

    const auto sup = superpose({1.0, 1.0}, {harmonic_eigenstate({0}, omega, model), harmonic_eigenstate({1}, omega, model)});
    const ComplexField f = sup.sample(g);
    const auto e = energy_rv(f, model);
    CHECK(max_over_mask(e, 0, [&](std::size_t) { return omega; }) > 1e-2);
    CHECK(std::abs(expectation(e, born_measure(f))[0] - omega) <= 1e-6);
}

namespace {

double madelung_gap(const ComplexField& f, const Model& model)
{
    const auto e1 = energy_rv(f, model);
    const auto e2 = energy_rv_madelung(f, model);
    double peak = 0.0;
    for (Complex c : f.values()) peak = std::max(peak, std::norm(c));
    double worst = 0.0;
    for (std::size_t i = 0; i < f.grid().size(); ++i) {
        if (std::norm(f[i]) <= 1e-6 * peak) continue;
        worst = std::max(worst, rel(e1.components[0][i], e2.components[0][i]));
    }
    return worst;
}

} // namespace

TEST_CASE("energy field agrees with its Madelung form")
{
    const Model model = harmonic_model(1.0, 1, 2, {1.0});
    const Grid g = Grid::make({{-8, 8}, {-8, 8}}, {64, 64});
    const auto s = superpose({1.0, Complex(0.3, 0.8), 0.5},
                             {harmonic_eigenstate({0, 0}, 1.0, model), harmonic_eigenstate({1, 0}, 1.0, model),
                              harmonic_eigenstate({1, 2}, 1.0, model)});
    CHECK(madelung_gap(s.sample(g, 0.4), model) <= 1e-6);

    // The grid path differentiates sqrt(rho) spectrally, which needs a nodeless state.
    const Model free = free_model(1, 2, {1.0});
    const Grid wide = Grid::make({{-12, 12}, {-12, 12}}, {128, 128});
    ComplexField f = gaussian_packet({0.5, -1.0}, 1.2, {0.7, 0.4}, free).sample(wide);
    f.drop_backing();
    CHECK(madelung_gap(f, free) <= 1e-6);
}

TEST_CASE("discrete expectation identities")
{
    const Model model = free_model(1, 2, {0.8});
    const Grid g = Grid::make({{-12, 12}, {-12, 12}}, {128, 128});
    const ComplexField f = gaussian_packet({1.0, -0.5}, 1.1, {0.9, -0.6}, model).sample(g);
    const auto m = born_measure(f);
    const auto v = expectation(drift_velocity(f, model, 0), m);
    const auto p = qm_momentum_expect(f, model, 0);
    for (std::size_t a = 0; a < 2; ++a) CHECK(rel(0.8 * v[a], p[a].real()) <= 1e-10);
    CHECK(rel(expectation(energy_rv(f, model), m)[0], qm_energy_expect(f, model)) <= 1e-10);

    // momentum variance decomposition
    const auto sq = qm_momentum_square(f, model, 0);
    const auto op = qm_momentum_square_operator(f, model, 0);
    const auto vv = drift_velocity(f, model, 0);
    const auto uu = osmotic_velocity(f, model, 0);
    for (std::size_t a = 0; a < 2; ++a) {
        CHECK(rel(sq[a], op[a]) <= 1e-8);
        const double qm_var = sq[a] - std::pow(p[a].real(), 2);
        const double var_v = expectation(RandomVariable{g, {vv.components[a]}, vv.mask}, m, 2, true)[0];
        const double eu2 = expectation(RandomVariable{g, {uu.components[a]}, uu.mask}, m, 2)[0];
        CHECK(rel(qm_var, 0.64 * (var_v + eu2)) <= 1e-6);
    }
}

TEST_CASE("node mask")
{
    const Model model = coulomb_model();
    const auto nm = node_mask(hydrogen_state(2, 1, 1).sample(cube(10.0, 16)));
    CHECK(nm.masked_mass <= 1e-9);
    CHECK_THROWS_AS(node_mask(hydrogen_state(1, 0, 0).sample(cube(10.0, 16)), 0.5), std::invalid_argument);
    const Grid g = cube(10.0, 16);
    CHECK_THROWS_AS(angular_momentum(ComplexField(Grid::make({{-1, 1}}, {8})), free_model(1, 1, {1.0}), 0, {}),
                    std::invalid_argument);
    (void)g;
}
