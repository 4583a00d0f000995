#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "bornlab/calculus.hpp"
#include "bornlab/grid.hpp"
#include "bornlab/spectral.hpp"

using namespace bornlab;

namespace {

ComplexField sample_fn(const Grid& g, auto&& f)
{
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.point(i));
    return ComplexField(g, std::move(v));
}

double max_abs_diff(const ComplexField& a, const ComplexField& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

ComplexField random_field(const Grid& g, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    std::vector<Complex> v(g.size());
    for (auto& c : v) c = Complex(n(rng), n(rng));
    return ComplexField(g, std::move(v));
}

} // namespace

TEST_CASE("make_grid derives spacing and cell volume")
{
    const Grid g1 = Grid::make({{-10, 10}}, {256});
    CHECK(g1.spacing(0) == doctest::Approx(0.078125).epsilon(1e-15));
    CHECK(g1.spectral_capable());

    const Grid g2 = Grid::make({{-8, 8}, {-8, 8}}, {128, 128});
    CHECK(g2.cell_volume() == doctest::Approx(0.015625).epsilon(1e-15));
    CHECK(g2.size() == 128u * 128u);

    CHECK_THROWS_AS(Grid::make({{0, 1}}, {3}), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make({{1, 1}}, {8}), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make({{0, 1}, {0, 1}}, {8}), std::invalid_argument);
    CHECK_FALSE(Grid::make({{0, 1}}, {12}).spectral_capable());
}

TEST_CASE("cell centers avoid the origin on symmetric even grids")
{
    const Grid g = Grid::make({{-2, 2}}, {8});
    CHECK(g.coordinate(0, 0) == doctest::Approx(-1.75));
    CHECK(g.coordinate(0, 3) == doctest::Approx(-0.25));
    const double x[] = {0.1};
    CHECK(g.locate(x) == 4u);
    const double out[] = {2.5};
    CHECK(g.locate(out) == Grid::npos);
}

TEST_CASE("gradient of a grid harmonic is exact")
{
    const Grid g = Grid::make({{-10, 10}}, {256});
    const double k = 2.0 * std::numbers::pi * 7.0 / 20.0;
    const auto f = sample_fn(g, [k](auto x) { return std::exp(Complex(0, k * x[0])); });
    const auto expected = sample_fn(g, [k](auto x) { return Complex(0, k) * std::exp(Complex(0, k * x[0])); });
    CHECK(max_abs_diff(gradient(f, 0), expected) <= 1e-10 * k);
    const auto lap_expected = sample_fn(g, [k](auto x) { return -k * k * std::exp(Complex(0, k * x[0])); });
    CHECK(max_abs_diff(laplacian(f), lap_expected) <= 1e-10 * k * k);
}

TEST_CASE("spectral gradient of a Gaussian matches the symbolic derivative")
{
    const Grid g = Grid::make({{-10, 10}}, {256});
    const auto f = sample_fn(g, [](auto x) { return std::exp(-x[0] * x[0] / 4.0); });
    const auto expected = sample_fn(g, [](auto x) { return -(x[0] / 2.0) * std::exp(-x[0] * x[0] / 4.0); });
    CHECK(max_abs_diff(gradient(f, 0), expected) <= 1e-8);
    CHECK_THROWS_AS(gradient(f, 1), std::out_of_range);
}

TEST_CASE("2D Gaussian Laplacian matches the closed form")
{
    const Grid g = Grid::make({{-10, 10}, {-10, 10}}, {128, 128});
    // f = exp(-(x^2 + y^2)/4), Lap f = ((x^2 + y^2)/4 - 1) f
    const auto f = sample_fn(g, [](auto x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 4.0); });
    const auto expected = sample_fn(g, [](auto x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return (r2 / 4.0 - 1.0) * std::exp(-r2 / 4.0);
    });
    // Relative to the peak value of the Laplacian (|Lap f(0)| = 1).
    CHECK(max_abs_diff(laplacian(f), expected) <= 1e-8);
}

TEST_CASE("derivatives of a constant vanish")
{
    const Grid g = Grid::make({{0, 1}, {0, 2}}, {16, 32});
    const ComplexField f(g, std::vector<Complex>(g.size(), Complex(3.0, -1.0)));
    for (std::size_t a = 0; a < 2; ++a) {
        for (Complex c : gradient(f, a).values()) CHECK(std::abs(c) < 1e-13);
    }
}

TEST_CASE("non power-of-two grids refuse spectral derivatives")
{
    const Grid g = Grid::make({{0, 1}}, {12});
    const ComplexField f(g, std::vector<Complex>(12, 1.0));
    CHECK_THROWS_AS(gradient(f, 0), std::invalid_argument);
}

TEST_CASE("inner product is Hermitian, positive and obeys Cauchy-Schwarz")
{
    const Grid g = Grid::make({{-1, 1}, {-2, 2}}, {16, 8});
    for (unsigned s = 0; s < 20; ++s) {
        const auto f = random_field(g, 2 * s);
        const auto h = random_field(g, 2 * s + 1);
        const Complex fh = inner_product(f, h);
        const Complex hf = inner_product(h, f);
        CHECK(std::abs(fh - std::conj(hf)) <= 1e-12 * std::abs(fh));
        CHECK(inner_product(f, f).real() > 0.0);
        CHECK(std::abs(inner_product(f, f).imag()) < 1e-12);
        CHECK(std::abs(fh) <= l2_norm(f) * l2_norm(h) * (1 + 1e-14));
    }
    const auto other = random_field(Grid::make({{-1, 1}, {-2, 2}}, {16, 16}), 1);
    CHECK_THROWS_AS(inner_product(random_field(g, 0), other), std::invalid_argument);
}

TEST_CASE("gradient and laplacian are linear")
{
    const Grid g = Grid::make({{-3, 3}, {-3, 3}}, {32, 16});
    for (unsigned s = 0; s < 5; ++s) {
        const auto f = random_field(g, 10 + s);
        const auto h = random_field(g, 20 + s);
        const Complex a(0.3, -1.2), b(2.0, 0.5);
        std::vector<Complex> comb(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) comb[i] = a * f[i] + b * h[i];
        const ComplexField c(g, comb);
        for (std::size_t axis = 0; axis < 2; ++axis) {
            const auto dc = gradient(c, axis);
            const auto df = gradient(f, axis);
            const auto dh = gradient(h, axis);
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                err = std::max(err, std::abs(dc[i] - (a * df[i] + b * dh[i])));
                scale = std::max(scale, std::abs(dc[i]));
            }
            CHECK(err <= 1e-12 * scale);
        }
        const auto lc = laplacian(c);
        const auto lf = laplacian(f);
        const auto lh = laplacian(h);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            err = std::max(err, std::abs(lc[i] - (a * lf[i] + b * lh[i])));
            scale = std::max(scale, std::abs(lc[i]));
        }
        CHECK(err <= 1e-12 * scale);
    }
}

TEST_CASE("l2_normalize")
{
    const Grid g = Grid::make({{-5, 5}}, {64});
    const auto f = l2_normalize(random_field(g, 3));
    CHECK(inner_product(f, f).real() == doctest::Approx(1.0).epsilon(1e-12));
    const auto again = l2_normalize(f);
    CHECK(max_abs_diff(again, f) < 1e-15);
    CHECK(max_abs_diff(l2_normalize(f.scaled(2.0)), f) < 1e-15);
    const ComplexField zero(g);
    CHECK_THROWS_AS(l2_normalize(zero), std::invalid_argument);
}

TEST_CASE("pairwise reduction is independent of call history")
{
    std::vector<double> v(10007);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i));
    const double a = pairwise_sum(std::span<const double>(v));
    const double b = pairwise_sum(std::span<const double>(v));
    CHECK(a == b);
    CHECK(a == doctest::Approx(9.78830575618427).epsilon(1e-10));
}
