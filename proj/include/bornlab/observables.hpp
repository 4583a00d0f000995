#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bornlab/field.hpp"
#include "bornlab/model.hpp"
#include "bornlab/probability.hpp"

namespace bornlab {

inline constexpr double kDefaultNodeThreshold = 1e-12;
inline constexpr double kMaskedMassLimit = 1e-9;

/// Cells where rho < threshold * max rho. Random variables are undefined there.
struct NodeMask {
    double threshold = kDefaultNodeThreshold;
    std::vector<std::uint8_t> mask;  // 1 = defined
    double masked_mass = 0.0;
    std::size_t masked_cells = 0;
};

/// Throws std::invalid_argument when the masked cells carry more than
/// kMaskedMassLimit of the Born mass.
NodeMask node_mask(const ComplexField& state, double threshold = kDefaultNodeThreshold);

/// v_a = (hbar/m_a) Im(conj(psi) grad_a psi) / rho, one component per body axis.
RandomVariable drift_velocity(const ComplexField& state, const Model& model, std::size_t body);

/// u_a = (hbar / 2 m_a) grad_a rho / rho.
RandomVariable osmotic_velocity(const ComplexField& state, const Model& model, std::size_t body);

/// H psi = sum_a -hbar^2/(2 m_a) Lap_a psi + V psi.
ComplexField apply_hamiltonian(const ComplexField& state, const Model& model);

/// E = Re(conj(psi) H psi) / rho.
RandomVariable energy_rv(const ComplexField& state, const Model& model);

/// E = sum_a (m_a/2) |v_a|^2 + V + Q, evaluated independently of H psi.
RandomVariable energy_rv_madelung(const ComplexField& state, const Model& model);

/// Q = -sum_b (hbar^2 / 2 m_b) Lap_b sqrt(rho) / sqrt(rho) on unmasked cells.
/// Uses the closed form of rho when the state has one.
RealField quantum_potential(const ComplexField& state, const Model& model);

/// l_a = (r_a - r0) x (m_a v_a); the body must have three coordinates.
RandomVariable angular_momentum(const ComplexField& state, const Model& model, std::size_t body,
                                std::array<double, 3> r0);

/// <psi, -i hbar d psi> per body axis.
std::vector<Complex> qm_momentum_expect(const ComplexField& state, const Model& model, std::size_t body);

/// <psi, H psi> (real part).
double qm_energy_expect(const ComplexField& state, const Model& model);

/// hbar^2 ||d psi||^2 per body axis: the quadratic-form value of <p^2>.
std::vector<double> qm_momentum_square(const ComplexField& state, const Model& model, std::size_t body);

/// Re <psi, -hbar^2 d^2 psi> per body axis (operator form of <p^2>).
std::vector<double> qm_momentum_square_operator(const ComplexField& state, const Model& model, std::size_t body);

} // namespace bornlab
