#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "bornlab/field.hpp"
#include "bornlab/grid.hpp"

namespace bornlab {

/// Nonnegative density on a grid with unit total mass. The sigma-algebra is
/// the finite algebra generated by the grid cells.
class ProbabilityMeasure {
public:
    /// Renormalizes silently when the total mass is within 1e-6 of one,
    /// otherwise throws std::invalid_argument. Negative or non-finite
    /// densities are rejected.
    static ProbabilityMeasure from_density(Grid grid, std::vector<double> density);

    const Grid& grid() const { return grid_; }
    std::span<const double> density() const { return density_; }
    std::span<const double> cell_mass() const { return cell_mass_; }
    double total_mass() const;

private:
    Grid grid_;
    std::vector<double> density_;
    std::vector<double> cell_mass_;
};

/// rho = |psi|^2 per cell.
ProbabilityMeasure born_measure(const ComplexField& state);

/// Axis-aligned box; a cell belongs to it iff its center lies in
/// [lo, hi) on every axis.
struct Box {
    std::vector<Interval> bounds;
};

/// Set of grid cells (sorted, unique).
class Event {
public:
    static Event full(const Grid& grid);
    static Event empty(const Grid& grid);
    static Event from_boxes(const Grid& grid, const std::vector<Box>& boxes);
    /// Throws std::out_of_range for indices outside the grid.
    static Event from_cells(const Grid& grid, std::vector<std::size_t> cells);
    /// Cells whose center satisfies `pred`.
    static Event from_predicate(const Grid& grid, const std::function<bool(std::span<const double>)>& pred);

    const Grid& grid() const { return grid_; }
    std::span<const std::size_t> cells() const { return cells_; }

    Event unite(const Event& other) const;
    Event intersect(const Event& other) const;
    bool subset_of(const Event& other) const;

private:
    Grid grid_;
    std::vector<std::size_t> cells_;
};

double prob(const ProbabilityMeasure& measure, const Event& event);

/// Restriction to `event`, rescaled by 1 / prob(event).
ProbabilityMeasure condition(const ProbabilityMeasure& measure, const Event& event);

/// Sums out every axis not in keep_axes. The result lives on the sub-grid
/// of the kept axes, in the given order.
ProbabilityMeasure marginal(const ProbabilityMeasure& measure, std::span<const std::size_t> keep_axes);

/// Portable uniform stream: MT19937-64 (sequence fixed by the C++ standard)
/// mapped to [0, 1) via the top 53 bits.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed);
    double next();

private:
    std::mt19937_64 engine_;
};

struct SampleSet {
    std::size_t dim = 0;
    std::vector<double> coords;  // row-major, dim per sample

    std::size_t count() const { return dim == 0 ? 0 : coords.size() / dim; }
    std::span<const double> point(std::size_t i) const { return std::span(coords).subspan(i * dim, dim); }
};

/// Inverse-CDF draw of a cell from the flattened cell masses, followed by a
/// uniform position inside that cell. Deterministic for a given seed.
SampleSet sample(const ProbabilityMeasure& measure, std::size_t n, std::uint64_t seed);

/// Real- or vector-valued function on the grid cells, undefined where mask == 0.
struct RandomVariable {
    Grid grid;
    std::vector<std::vector<double>> components;
    std::vector<std::uint8_t> mask;

    std::size_t arity() const { return components.size(); }
    static RandomVariable scalar(Grid grid, std::vector<double> values, std::vector<std::uint8_t> mask = {});
};

/// Largest mass a single masked cell may carry before an expectation is refused.
inline constexpr double kMaskedCellMassLimit = 1e-9;

/// sum over unmasked cells of value^order * cell_mass (or the central moment
/// about the mean). One entry per component.
std::vector<double> expectation(const RandomVariable& rv, const ProbabilityMeasure& measure, int order = 1,
                                bool central = false);

/// Position coordinate random variables for the given axes.
RandomVariable position_rv(const Grid& grid, std::span<const std::size_t> axes);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 0.0;
    std::size_t bins = 0;
};

/// Pearson goodness-of-fit of samples against the measure. Cells are grouped
/// into `bins` contiguous blocks of the flattened index; neighbouring blocks
/// are merged until each expects at least 5 counts.
ChiSquareResult chi_square_test(const ProbabilityMeasure& measure, const SampleSet& samples, std::size_t bins);

} // namespace bornlab
