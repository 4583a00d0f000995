#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bornlab/field.hpp"
#include "bornlab/model.hpp"

namespace bornlab {

enum class ResidualEquation { continuity, force, vorticity };

std::string to_string(ResidualEquation e);
ResidualEquation residual_equation_from_string(const std::string& s);

struct ResidualReport {
    ResidualEquation equation = ResidualEquation::continuity;
    double norm_l2 = 0.0;   // sqrt(sum r^2 dV) over unmasked cells (and components)
    double norm_max = 0.0;
    double h = 0.0;         // largest grid spacing
    double dt = 0.0;        // 0 for instantaneous checks
    double masked_fraction = 0.0;
    bool reliable = true;   // masked_fraction < 0.2
};

/// Residual cells are those with rho >= threshold * max rho in every snapshot used.
struct ResidualOptions {
    double threshold = 1e-12;
};

/// d rho/dt + sum_a div_a(rho v_a) at the middle of three snapshots spaced dt
/// apart (centered difference in time).
ResidualReport continuity_residual(const std::array<ComplexField, 3>& snapshots, double dt, const Model& model,
                                   ResidualOptions opt = {});

/// m_a (d/dt + sum_b v_b . grad_b) v_a + grad_a (V + Q) for one body, all of
/// its coordinates pooled into the norms.
ResidualReport force_residual(const std::array<ComplexField, 3>& snapshots, double dt, const Model& model,
                              std::size_t body, ResidualOptions opt = {});

/// Same residuals with the time derivative taken from the closed form as well.
/// The state must carry an analytic backing.
ResidualReport continuity_residual_exact(const ComplexField& state, const Model& model, ResidualOptions opt = {});
ResidualReport force_residual_exact(const ComplexField& state, const Model& model, std::size_t body,
                                    ResidualOptions opt = {});

/// Spatial Jacobian of the stacked drift velocity: jac[i * dim + j] = d v^i / d x_j.
struct VelocityGradient {
    Grid grid;
    std::vector<std::vector<double>> jac;
    std::vector<std::uint8_t> mask;

    static VelocityGradient of_state(const ComplexField& state, const Model& model, ResidualOptions opt = {});
    /// Prescribed field, e.g. a rigid rotation as a negative control.
    static VelocityGradient from_function(const Grid& grid,
                                          const std::function<void(std::span<const double>, std::span<double>)>& f);
};

/// max over coordinate pairs (alpha, beta) of m_alpha d_beta v^alpha - m_beta d_alpha v^beta.
ResidualReport vorticity_residual(const ComplexField& state, const Model& model, ResidualOptions opt = {});
ResidualReport vorticity_residual(const VelocityGradient& grad, const Model& model);

struct Resolution {
    std::size_t points = 0;  // per axis
    double dt = 0.0;
};

/// Builds the three snapshots for one resolution (the middle one is used
/// alone for vorticity).
using SnapshotBuilder = std::function<std::array<ComplexField, 3>(const Resolution&)>;

struct ConvergenceResult {
    ResidualEquation equation = ResidualEquation::continuity;
    std::vector<Resolution> resolutions;
    std::vector<ResidualReport> reports;
    std::optional<double> order;  // empty when saturated
    bool saturated = false;       // every norm at round-off (<= 1e-10)
};

/// Least-squares slope of log(norm_l2) against log(dt), or log(h) when dt is
/// held fixed. Needs >= 3 geometrically refined resolutions.
ConvergenceResult convergence_study(const Model& model, const SnapshotBuilder& build,
                                    const std::vector<Resolution>& resolutions, ResidualEquation equation,
                                    std::size_t body = 0, ResidualOptions opt = {});

} // namespace bornlab
