#include "bornlab/calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bornlab/spectral.hpp"

namespace bornlab {

namespace {

void check_axis(const Grid& g, std::size_t axis, const char* what)
{
    if (axis >= g.dim()) {
        throw std::out_of_range(std::string(what) + ": axis " + std::to_string(axis) + " out of range");
    }
}

template <typename F>
ComplexField from_jets(const ComplexField& f, F&& pick)
{
    const Grid& g = f.grid();
    const AnalyticBacking& b = *f.backing();
    std::vector<Complex> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        const Jet2 j = b.form->jet2(std::span(x.data(), g.dim()), b.time, false);
        out[i] = b.scale * pick(j);
    }
    return ComplexField(g, std::move(out));
}

} // namespace

ComplexField gradient(const ComplexField& f, std::size_t axis)
{
    check_axis(f.grid(), axis, "gradient");
    const int a = static_cast<int>(axis);
    if (f.has_backing()) return from_jets(f, [a](const Jet2& j) { return j.d(a); });
    spectral::Orders o{};
    o[axis] = 1;
    return ComplexField(f.grid(), spectral::derivative(f.grid(), f.values(), o));
}

ComplexField laplacian(const ComplexField& f, std::span<const std::size_t> axes)
{
    std::vector<std::size_t> group(axes.begin(), axes.end());
    if (group.empty()) {
        for (std::size_t a = 0; a < f.grid().dim(); ++a) group.push_back(a);
    }
    for (auto a : group) check_axis(f.grid(), a, "laplacian");
    if (f.has_backing()) {
        return from_jets(f, [&group](const Jet2& j) {
            Complex s{};
            for (auto a : group) s += j.d(static_cast<int>(a), static_cast<int>(a));
            return s;
        });
    }
    spectral::require_spectral(f.grid(), "laplacian");
    std::vector<Complex> hat(f.values().begin(), f.values().end());
    spectral::fft(hat, f.grid().shape(), -1);
    std::vector<Complex> sum(f.size());
    for (auto a : group) {
        spectral::Orders o{};
        o[a] = 2;
        auto d = spectral::apply_multiplier(f.grid(), hat, o);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d[i];
    }
    return ComplexField(f.grid(), std::move(sum));
}

Complex inner_product(const ComplexField& f, const ComplexField& g)
{
    require_same_grid(f.grid(), g.grid(), "inner_product");
    const auto fv = f.values();
    const auto gv = g.values();
    const Complex s = pairwise_sum_of<Complex>(0, fv.size(), [&](std::size_t i) { return std::conj(fv[i]) * gv[i]; });
    return s * f.grid().cell_volume();
}

double l2_norm(const ComplexField& f)
{
    const auto v = f.values();
    const double s = pairwise_sum_of<double>(0, v.size(), [&](std::size_t i) { return std::norm(v[i]); });
    return std::sqrt(s * f.grid().cell_volume());
}

ComplexField l2_normalize(const ComplexField& f)
{
    const double n = l2_norm(f);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("l2_normalize: zero or non-finite field");
    return f.scaled(1.0 / n);
}

Derivatives differentiate(const ComplexField& f, bool with_second)
{
    const Grid& g = f.grid();
    const std::size_t d = g.dim();
    Derivatives out;
    const std::size_t n_second = with_second ? d * (d + 1) / 2 : 0;
    if (f.has_backing()) {
        const AnalyticBacking& b = *f.backing();
        std::vector<std::vector<Complex>> first(d, std::vector<Complex>(g.size()));
        std::vector<std::vector<Complex>> second(n_second, std::vector<Complex>(g.size()));
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.point(i);
            const Jet2 j = b.form->jet2(std::span(x.data(), d), b.time, false);
            for (std::size_t a = 0; a < d; ++a) first[a][i] = b.scale * j.d(static_cast<int>(a));
            for (std::size_t a = 0; a < d && with_second; ++a) {
                for (std::size_t c = a; c < d; ++c) {
                    second[packed_index(a, c, d)][i] = b.scale * j.d(static_cast<int>(a), static_cast<int>(c));
                }
            }
        }
        for (auto& v : first) out.first.emplace_back(g, std::move(v));
        for (auto& v : second) out.second.emplace_back(g, std::move(v));
        return out;
    }
    spectral::require_spectral(g, "differentiate");
    std::vector<Complex> hat(f.values().begin(), f.values().end());
    spectral::fft(hat, g.shape(), -1);
    for (std::size_t a = 0; a < d; ++a) {
        spectral::Orders o{};
        o[a] = 1;
        out.first.emplace_back(g, spectral::apply_multiplier(g, hat, o));
    }
    if (with_second) {
        out.second.resize(n_second);
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t c = a; c < d; ++c) {
                spectral::Orders o{};
                o[a] += 1;
                o[c] += 1;
                out.second[packed_index(a, c, d)] = ComplexField(g, spectral::apply_multiplier(g, hat, o));
            }
        }
    }
    return out;
}

} // namespace bornlab
