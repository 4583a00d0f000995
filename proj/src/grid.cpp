#include "bornlab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bornlab {

Grid Grid::make(std::vector<Interval> extents, std::vector<std::size_t> points)
{
    if (extents.empty() || extents.size() != points.size()) {
        throw std::invalid_argument("grid: extents and points must be non-empty and of equal length");
    }
    if (extents.size() > kMaxDim) {
        throw std::invalid_argument("grid: at most " + std::to_string(kMaxDim) + " axes are supported");
    }
    Grid g;
    g.extents_ = std::move(extents);
    g.points_ = std::move(points);
    g.spacing_.resize(g.dim());
    g.strides_.resize(g.dim());
    g.size_ = 1;
    g.cell_volume_ = 1.0;
    for (std::size_t a = 0; a < g.dim(); ++a) {
        const auto [lo, hi] = g.extents_[a];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
            throw std::invalid_argument("grid: axis " + std::to_string(a) + " needs finite lo < hi");
        }
        if (g.points_[a] < kMinPoints) {
            throw std::invalid_argument("grid: axis " + std::to_string(a) + " has "
                                        + std::to_string(g.points_[a]) + " points, minimum is "
                                        + std::to_string(kMinPoints));
        }
        g.spacing_[a] = (hi - lo) / static_cast<double>(g.points_[a]);
        g.cell_volume_ *= g.spacing_[a];
        g.size_ *= g.points_[a];
    }
    std::size_t s = 1;
    for (std::size_t a = g.dim(); a-- > 0;) {
        g.strides_[a] = s;
        s *= g.points_[a];
    }
    return g;
}

bool Grid::spectral_capable() const
{
    for (std::size_t n : points_) {
        if ((n & (n - 1)) != 0) return false;
    }
    return !points_.empty();
}

std::array<double, kMaxDim> Grid::point(std::size_t flat) const
{
    std::array<double, kMaxDim> x{};
    for (std::size_t a = 0; a < dim(); ++a) x[a] = coordinate(a, axis_index(flat, a));
    return x;
}

std::size_t Grid::locate(std::span<const double> x) const
{
    if (x.size() != dim()) return npos;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dim(); ++a) {
        const double u = (x[a] - extents_[a].lo) / spacing_[a];
        if (!(u >= 0.0) || u >= static_cast<double>(points_[a])) return npos;
        flat += static_cast<std::size_t>(u) * strides_[a];
    }
    return flat;
}

Grid Grid::sub_grid(std::span<const std::size_t> axes) const
{
    std::vector<Interval> e;
    std::vector<std::size_t> p;
    for (std::size_t a : axes) {
        e.push_back(extents_.at(a));
        p.push_back(points_.at(a));
    }
    return make(std::move(e), std::move(p));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

} // namespace bornlab
