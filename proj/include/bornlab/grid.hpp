#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace bornlab {

inline constexpr std::size_t kMaxDim = 3;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval&) const = default;
};

/// Uniform Cartesian grid of cells. Samples sit at cell centers,
/// x_i = lo + (i + 1/2) h, so symmetric boxes with an even point count never
/// sample the origin. Storage order is row-major (last axis fastest).
class Grid {
public:
    static constexpr std::size_t kMinPoints = 4;

    Grid() = default;

    /// Throws std::invalid_argument on empty/mismatched input, lo >= hi,
    /// fewer than kMinPoints points, or more than kMaxDim axes.
    static Grid make(std::vector<Interval> extents, std::vector<std::size_t> points);

    std::size_t dim() const { return extents_.size(); }
    std::size_t size() const { return size_; }
    std::size_t points(std::size_t axis) const { return points_.at(axis); }
    const std::vector<std::size_t>& shape() const { return points_; }
    const Interval& extent(std::size_t axis) const { return extents_.at(axis); }
    const std::vector<Interval>& extents() const { return extents_; }
    double length(std::size_t axis) const { return extents_.at(axis).hi - extents_.at(axis).lo; }
    double spacing(std::size_t axis) const { return spacing_.at(axis); }
    double cell_volume() const { return cell_volume_; }

    /// Periodic FFT differentiation needs every axis to be a power of two.
    bool spectral_capable() const;

    double coordinate(std::size_t axis, std::size_t i) const
    {
        return extents_[axis].lo + (static_cast<double>(i) + 0.5) * spacing_[axis];
    }

    std::size_t stride(std::size_t axis) const { return strides_[axis]; }
    std::size_t axis_index(std::size_t flat, std::size_t axis) const
    {
        return (flat / strides_[axis]) % points_[axis];
    }

    std::array<double, kMaxDim> point(std::size_t flat) const;

    /// Cell containing x (clamped to the grid), or npos when outside.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t locate(std::span<const double> x) const;

    /// Grid spanned by a subset of axes, in the given order.
    Grid sub_grid(std::span<const std::size_t> axes) const;

    bool operator==(const Grid& other) const
    {
        return extents_ == other.extents_ && points_ == other.points_;
    }

private:
    std::vector<Interval> extents_;
    std::vector<std::size_t> points_;
    std::vector<double> spacing_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
    double cell_volume_ = 0.0;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

} // namespace bornlab
