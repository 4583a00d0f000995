#include "bornlab/probability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace bornlab {

namespace {

constexpr double kRenormalizeWindow = 1e-6;

} // namespace

ProbabilityMeasure ProbabilityMeasure::from_density(Grid grid, std::vector<double> density)
{
    if (density.size() != grid.size()) throw std::invalid_argument("probability measure: density size mismatch");
    for (double d : density) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw std::invalid_argument("probability measure: density must be finite and nonnegative");
        }
    }
    const double vol = grid.cell_volume();
    const double total = pairwise_sum(std::span<const double>(density)) * vol;
    if (std::abs(total - 1.0) > kRenormalizeWindow) {
        throw std::invalid_argument("probability measure: total mass " + std::to_string(total)
                                    + " is not 1 within 1e-6 (unnormalized input)");
    }
    ProbabilityMeasure m;
    m.grid_ = std::move(grid);
    m.density_ = std::move(density);
    for (double& d : m.density_) d /= total;
    m.cell_mass_.resize(m.density_.size());
    for (std::size_t i = 0; i < m.density_.size(); ++i) m.cell_mass_[i] = m.density_[i] * vol;
    return m;
}

double ProbabilityMeasure::total_mass() const { return pairwise_sum(std::span<const double>(cell_mass_)); }

ProbabilityMeasure born_measure(const ComplexField& state)
{
    std::vector<double> rho(state.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(state[i]);
    return ProbabilityMeasure::from_density(state.grid(), std::move(rho));
}

Event Event::full(const Grid& grid)
{
    Event e;
    e.grid_ = grid;
    e.cells_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) e.cells_[i] = i;
    return e;
}

Event Event::empty(const Grid& grid)
{
    Event e;
    e.grid_ = grid;
    return e;
}

Event Event::from_boxes(const Grid& grid, const std::vector<Box>& boxes)
{
    for (const Box& b : boxes) {
        if (b.bounds.size() != grid.dim()) throw std::invalid_argument("event: box dimension does not match grid");
    }
    return from_predicate(grid, [&boxes](std::span<const double> x) {
        for (const Box& b : boxes) {
            bool inside = true;
            for (std::size_t a = 0; a < x.size() && inside; ++a) {
                inside = x[a] >= b.bounds[a].lo && x[a] < b.bounds[a].hi;
            }
            if (inside) return true;
        }
        return false;
    });
}

Event Event::from_cells(const Grid& grid, std::vector<std::size_t> cells)
{
    for (std::size_t c : cells) {
        if (c >= grid.size()) throw std::out_of_range("event: cell index " + std::to_string(c) + " outside the grid");
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    Event e;
    e.grid_ = grid;
    e.cells_ = std::move(cells);
    return e;
}

Event Event::from_predicate(const Grid& grid, const std::function<bool(std::span<const double>)>& pred)
{
    Event e;
    e.grid_ = grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.point(i);
        if (pred(std::span<const double>(x.data(), grid.dim()))) e.cells_.push_back(i);
    }
    return e;
}

Event Event::unite(const Event& other) const
{
    require_same_grid(grid_, other.grid_, "event union");
    Event e;
    e.grid_ = grid_;
    std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(), std::back_inserter(e.cells_));
    return e;
}

Event Event::intersect(const Event& other) const
{
    require_same_grid(grid_, other.grid_, "event intersection");
    Event e;
    e.grid_ = grid_;
    std::set_intersection(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                          std::back_inserter(e.cells_));
    return e;
}

bool Event::subset_of(const Event& other) const
{
    return std::includes(other.cells_.begin(), other.cells_.end(), cells_.begin(), cells_.end());
}

double prob(const ProbabilityMeasure& measure, const Event& event)
{
    require_same_grid(measure.grid(), event.grid(), "prob");
    const auto mass = measure.cell_mass();
    const auto cells = event.cells();
    return pairwise_sum_of<double>(0, cells.size(), [&](std::size_t i) { return mass[cells[i]]; });
}

ProbabilityMeasure condition(const ProbabilityMeasure& measure, const Event& event)
{
    const double p = prob(measure, event);
    if (!(p > 0.0)) throw std::invalid_argument("condition: event has zero probability");
    std::vector<double> density(measure.grid().size(), 0.0);
    for (std::size_t c : event.cells()) density[c] = measure.density()[c] / p;
    return ProbabilityMeasure::from_density(measure.grid(), std::move(density));
}

ProbabilityMeasure marginal(const ProbabilityMeasure& measure, std::span<const std::size_t> keep_axes)
{
    const Grid& g = measure.grid();
    if (keep_axes.empty()) throw std::invalid_argument("marginal: keep_axes is empty");
    std::vector<bool> seen(g.dim(), false);
    for (std::size_t a : keep_axes) {
        if (a >= g.dim() || seen[a]) throw std::invalid_argument("marginal: invalid or repeated axis");
        seen[a] = true;
    }
    const Grid sub = g.sub_grid(keep_axes);
    // Group cells by their kept-axis index, then reduce each group pairwise.
    std::vector<std::vector<double>> groups(sub.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t j = 0;
        for (std::size_t k = 0; k < keep_axes.size(); ++k) j += g.axis_index(i, keep_axes[k]) * sub.stride(k);
        groups[j].push_back(measure.cell_mass()[i]);
    }
    std::vector<double> density(sub.size());
    for (std::size_t j = 0; j < sub.size(); ++j) {
        density[j] = pairwise_sum(std::span<const double>(groups[j])) / sub.cell_volume();
    }
    return ProbabilityMeasure::from_density(sub, std::move(density));
}

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

SampleSet sample(const ProbabilityMeasure& measure, std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw std::invalid_argument("sample: n must be at least 1");
    const Grid& g = measure.grid();
    const auto mass = measure.cell_mass();
    std::vector<double> cdf(mass.size());
    double run = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        run += mass[i];
        cdf[i] = run;
    }
    UniformStream u(seed);
    SampleSet out;
    out.dim = g.dim();
    out.coords.reserve(n * g.dim());
    for (std::size_t s = 0; s < n; ++s) {
        const double target = u.next() * run;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        std::size_t cell = it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
        while (mass[cell] == 0.0 && cell > 0) --cell;
        for (std::size_t a = 0; a < g.dim(); ++a) {
            const double lo = g.extent(a).lo + static_cast<double>(g.axis_index(cell, a)) * g.spacing(a);
            out.coords.push_back(lo + u.next() * g.spacing(a));
        }
    }
    return out;
}

RandomVariable RandomVariable::scalar(Grid grid, std::vector<double> values, std::vector<std::uint8_t> mask)
{
    if (values.size() != grid.size()) throw std::invalid_argument("random variable: value count mismatch");
    if (mask.empty()) mask.assign(grid.size(), 1);
    RandomVariable rv;
    rv.grid = std::move(grid);
    rv.components.push_back(std::move(values));
    rv.mask = std::move(mask);
    return rv;
}

std::vector<double> expectation(const RandomVariable& rv, const ProbabilityMeasure& measure, int order, bool central)
{
    require_same_grid(rv.grid, measure.grid(), "expectation");
    if (order < 1) throw std::invalid_argument("expectation: order must be positive");
    const auto mass = measure.cell_mass();
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (!rv.mask[i] && mass[i] > kMaskedCellMassLimit) {
            throw std::invalid_argument("expectation: masked cell " + std::to_string(i) + " carries mass "
                                        + std::to_string(mass[i]) + " (random variable undefined on a non-null set)");
        }
    }
    std::vector<double> out;
    for (const auto& comp : rv.components) {
        double mean = 0.0;
        if (central) {
            mean = pairwise_sum_of<double>(0, mass.size(),
                                           [&](std::size_t i) { return rv.mask[i] ? comp[i] * mass[i] : 0.0; });
        }
        out.push_back(pairwise_sum_of<double>(0, mass.size(), [&](std::size_t i) {
            if (!rv.mask[i]) return 0.0;
            const double x = comp[i] - mean;
            double p = x;
            for (int k = 1; k < order; ++k) p *= x;
            return p * mass[i];
        }));
    }
    return out;
}

RandomVariable position_rv(const Grid& grid, std::span<const std::size_t> axes)
{
    RandomVariable rv;
    rv.grid = grid;
    rv.mask.assign(grid.size(), 1);
    for (std::size_t a : axes) {
        if (a >= grid.dim()) throw std::out_of_range("position_rv: axis out of range");
        std::vector<double> c(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) c[i] = grid.coordinate(a, grid.axis_index(i, a));
        rv.components.push_back(std::move(c));
    }
    return rv;
}

ChiSquareResult chi_square_test(const ProbabilityMeasure& measure, const SampleSet& samples, std::size_t bins)
{
    const Grid& g = measure.grid();
    if (bins < 2 || bins > g.size()) throw std::invalid_argument("chi_square_test: bins must be in [2, cells]");
    if (samples.dim != g.dim() || samples.count() == 0) throw std::invalid_argument("chi_square_test: bad sample set");
    const double n = static_cast<double>(samples.count());
    std::vector<double> expected(bins, 0.0);
    std::vector<double> observed(bins, 0.0);
    auto bin_of = [&](std::size_t cell) { return cell * bins / g.size(); };
    for (std::size_t c = 0; c < g.size(); ++c) expected[bin_of(c)] += n * measure.cell_mass()[c];
    for (std::size_t s = 0; s < samples.count(); ++s) {
        const std::size_t c = g.locate(samples.point(s));
        if (c == Grid::npos) throw std::invalid_argument("chi_square_test: sample outside the grid");
        observed[bin_of(c)] += 1.0;
    }
    std::vector<double> e_merged, o_merged;
    double e_acc = 0.0, o_acc = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        e_acc += expected[b];
        o_acc += observed[b];
        if (e_acc >= 5.0) {
            e_merged.push_back(e_acc);
            o_merged.push_back(o_acc);
            e_acc = o_acc = 0.0;
        }
    }
    if (e_merged.empty()) throw std::invalid_argument("chi_square_test: too few samples for any bin");
    e_merged.back() += e_acc;
    o_merged.back() += o_acc;
    ChiSquareResult r;
    r.bins = e_merged.size();
    for (std::size_t b = 0; b < r.bins; ++b) {
        const double d = o_merged[b] - e_merged[b];
        r.statistic += d * d / e_merged[b];
    }
    r.dof = r.bins - 1;
    r.p_value = r.dof == 0 ? 1.0 : boost::math::gamma_q(0.5 * static_cast<double>(r.dof), 0.5 * r.statistic);
    return r;
}

} // namespace bornlab
