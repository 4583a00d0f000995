#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bornlab/field.hpp"
#include "bornlab/grid.hpp"

namespace bornlab {

enum class PotentialKind { free, harmonic, coulomb, barrier, custom };

std::string to_string(PotentialKind kind);

enum class SlitSelection { both, left, right };

std::string to_string(SlitSelection s);
SlitSelection slit_selection_from_string(const std::string& s);

/// Finite wall at barrier_x <= x < barrier_x + thickness, open only inside
/// the selected slit intervals in y. "left" is the first (lower-y) slit.
struct BarrierGeometry {
    double barrier_x = 0.0;
    double thickness = 0.0;
    std::array<double, 2> slit_centers{};
    double slit_width = 0.0;
    double height = 0.0;
    SlitSelection open = SlitSelection::both;

    bool blocks(double x, double y) const;
};

struct Potential {
    PotentialKind kind = PotentialKind::free;
    std::function<double(std::span<const double>)> value;
    // Optional exact gradient; when absent, force checks differentiate V spectrally.
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    double omega = 0.0;   // harmonic
    double charge = 0.0;  // coulomb
    std::optional<BarrierGeometry> barrier;
};

/// Time-independent Hamiltonian sum_a -hbar^2/(2 m_a) Lap_a + V for N bodies
/// with `dims_per_body` coordinates each. Axis k belongs to body k / dims_per_body.
struct Model {
    std::size_t bodies = 1;
    std::size_t dims_per_body = 1;
    std::vector<double> masses{1.0};
    double hbar = 1.0;
    Potential potential;

    std::size_t dim() const { return bodies * dims_per_body; }
    std::size_t body_of_axis(std::size_t axis) const { return axis / dims_per_body; }
    double mass_of_axis(std::size_t axis) const { return masses.at(body_of_axis(axis)); }
    std::vector<std::size_t> body_axes(std::size_t body) const;

    /// Throws std::invalid_argument when masses/hbar are not positive or the
    /// coordinate count exceeds kMaxDim.
    void validate() const;
    void check_grid(const Grid& grid, const char* what) const;
    void check_body(std::size_t body, const char* what) const;

    double potential_at(std::span<const double> x) const;
    RealField potential_field(const Grid& grid) const;
};

Model free_model(std::size_t bodies, std::size_t dims_per_body, std::vector<double> masses, double hbar = 1.0);

/// V = sum_a m_a omega^2 |r_a|^2 / 2.
Model harmonic_model(double omega, std::size_t bodies, std::size_t dims_per_body, std::vector<double> masses,
                     double hbar = 1.0);

/// Hydrogen in atomic units: one body in 3D, mu = hbar = 1, V = -1/|r|.
Model coulomb_model();

/// Two-dimensional one-body model with a finite double-slit wall.
Model double_slit_model(double barrier_x, std::array<double, 2> slit_centers, double slit_width,
                        double barrier_height, SlitSelection which, double thickness, double mass = 1.0,
                        double hbar = 1.0);

/// Potential sampled on a grid; V(x) is the value of the cell containing x.
Model custom_model(RealField potential, std::size_t bodies, std::size_t dims_per_body, std::vector<double> masses,
                   double hbar = 1.0);

} // namespace bornlab
