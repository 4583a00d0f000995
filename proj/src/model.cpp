#include "bornlab/model.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace bornlab {

std::string to_string(PotentialKind kind)
{
    switch (kind) {
    case PotentialKind::free: return "free";
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::coulomb: return "coulomb";
    case PotentialKind::barrier: return "barrier";
    case PotentialKind::custom: return "custom";
    }
    return "unknown";
}

std::string to_string(SlitSelection s)
{
    switch (s) {
    case SlitSelection::both: return "both";
    case SlitSelection::left: return "left";
    case SlitSelection::right: return "right";
    }
    return "unknown";
}

SlitSelection slit_selection_from_string(const std::string& s)
{
    if (s == "both") return SlitSelection::both;
    if (s == "left") return SlitSelection::left;
    if (s == "right") return SlitSelection::right;
    throw std::invalid_argument("unknown slit selection '" + s + "' (expected both|left|right)");
}

bool BarrierGeometry::blocks(double x, double y) const
{
    if (x < barrier_x || x >= barrier_x + thickness) return false;
    const double half = 0.5 * slit_width;
    const bool in_first = y >= slit_centers[0] - half && y < slit_centers[0] + half;
    const bool in_second = y >= slit_centers[1] - half && y < slit_centers[1] + half;
    switch (open) {
    case SlitSelection::both: return !(in_first || in_second);
    case SlitSelection::left: return !in_first;
    case SlitSelection::right: return !in_second;
    }
    return true;
}

std::vector<std::size_t> Model::body_axes(std::size_t body) const
{
    check_body(body, "body_axes");
    std::vector<std::size_t> axes(dims_per_body);
    for (std::size_t k = 0; k < dims_per_body; ++k) axes[k] = body * dims_per_body + k;
    return axes;
}

void Model::validate() const
{
    if (bodies == 0 || dims_per_body == 0) throw std::invalid_argument("model: bodies and dims_per_body must be positive");
    if (dim() > kMaxDim) throw std::invalid_argument("model: at most " + std::to_string(kMaxDim) + " coordinates supported");
    if (masses.size() != bodies) throw std::invalid_argument("model: need one mass per body");
    for (double m : masses) {
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("model: masses must be positive");
    }
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("model: hbar must be positive");
    if (!potential.value) throw std::invalid_argument("model: potential has no evaluator");
}

void Model::check_grid(const Grid& grid, const char* what) const
{
    validate();
    if (grid.dim() != dim()) {
        throw std::invalid_argument(std::string(what) + ": grid has " + std::to_string(grid.dim())
                                    + " axes but the model has " + std::to_string(dim()) + " coordinates");
    }
}

void Model::check_body(std::size_t body, const char* what) const
{
    if (body >= bodies) throw std::out_of_range(std::string(what) + ": body index " + std::to_string(body) + " out of range");
}

double Model::potential_at(std::span<const double> x) const { return potential.value(x); }

RealField Model::potential_field(const Grid& grid) const
{
    check_grid(grid, "potential_field");
    RealField v(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.point(i);
        v.values[i] = potential.value(std::span(x.data(), grid.dim()));
    }
    return v;
}

Model free_model(std::size_t bodies, std::size_t dims_per_body, std::vector<double> masses, double hbar)
{
    Model m;
    m.bodies = bodies;
    m.dims_per_body = dims_per_body;
    m.masses = std::move(masses);
    m.hbar = hbar;
    m.potential.kind = PotentialKind::free;
    m.potential.value = [](std::span<const double>) { return 0.0; };
    m.potential.gradient = [](std::span<const double>, std::span<double> g) {
        for (double& c : g) c = 0.0;
    };
    m.validate();
    return m;
}

Model harmonic_model(double omega, std::size_t bodies, std::size_t dims_per_body, std::vector<double> masses,
                     double hbar)
{
    if (!(omega > 0.0)) throw std::invalid_argument("harmonic model: omega must be positive");
    Model m = free_model(bodies, dims_per_body, std::move(masses), hbar);
    m.potential.kind = PotentialKind::harmonic;
    m.potential.omega = omega;
    std::vector<double> k(m.dim());
    for (std::size_t a = 0; a < m.dim(); ++a) k[a] = m.mass_of_axis(a) * omega * omega;
    m.potential.value = [k](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t a = 0; a < k.size(); ++a) v += 0.5 * k[a] * x[a] * x[a];
        return v;
    };
    m.potential.gradient = [k](std::span<const double> x, std::span<double> g) {
        for (std::size_t a = 0; a < k.size(); ++a) g[a] = k[a] * x[a];
    };
    return m;
}

Model coulomb_model()
{
    Model m = free_model(1, 3, {1.0}, 1.0);
    m.potential.kind = PotentialKind::coulomb;
    m.potential.charge = 1.0;
    m.potential.value = [](std::span<const double> x) {
        return -1.0 / std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    };
    m.potential.gradient = [](std::span<const double> x, std::span<double> g) {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
        for (int a = 0; a < 3; ++a) g[a] = x[a] * inv_r3;
    };
    return m;
}

Model double_slit_model(double barrier_x, std::array<double, 2> slit_centers, double slit_width,
                        double barrier_height, SlitSelection which, double thickness, double mass, double hbar)
{
    if (!(slit_width > 0.0)) throw std::invalid_argument("double slit: slit_width must be positive");
    if (!(barrier_height > 0.0)) throw std::invalid_argument("double slit: barrier_height must be positive");
    if (!(thickness > 0.0)) throw std::invalid_argument("double slit: thickness must be positive");
    if (slit_centers[0] > slit_centers[1]) std::swap(slit_centers[0], slit_centers[1]);
    if (slit_centers[1] - slit_centers[0] <= slit_width) {
        throw std::invalid_argument("double slit: slits overlap (center distance must exceed slit width)");
    }
    Model m = free_model(1, 2, {mass}, hbar);
    BarrierGeometry geo{barrier_x, thickness, slit_centers, slit_width, barrier_height, which};
    m.potential.kind = PotentialKind::barrier;
    m.potential.barrier = geo;
    m.potential.value = [geo](std::span<const double> x) { return geo.blocks(x[0], x[1]) ? geo.height : 0.0; };
    m.potential.gradient = nullptr;
    return m;
}

Model custom_model(RealField potential, std::size_t bodies, std::size_t dims_per_body, std::vector<double> masses,
                   double hbar)
{
    Model m = free_model(bodies, dims_per_body, std::move(masses), hbar);
    m.check_grid(potential.grid, "custom model");
    for (double v : potential.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("custom model: potential must be finite");
    }
    auto field = std::make_shared<const RealField>(std::move(potential));
    m.potential.kind = PotentialKind::custom;
    m.potential.value = [field](std::span<const double> x) {
        const std::size_t i = field->grid.locate(x);
        return i == Grid::npos ? 0.0 : field->values[i];
    };
    m.potential.gradient = nullptr;
    return m;
}

} // namespace bornlab
