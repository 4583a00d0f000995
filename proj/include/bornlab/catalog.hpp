#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bornlab/field.hpp"
#include "bornlab/model.hpp"

namespace bornlab {

/// One term c * psi of a catalog state. Terms sharing a family are mutually
/// orthonormal eigenstates (hydrogen, harmonic) or Gaussians with a closed-form overlap.
struct StateComponent {
    Complex coeff{1.0, 0.0};
    std::shared_ptr<const AnalyticForm> form;
    std::optional<double> energy;
    std::vector<int> quantum_numbers;
};

/// Closed-form state with exact derivatives. The form is unit-normalized on
/// R^d; sample() additionally renormalizes on the discrete grid.
class CatalogState {
public:
    const std::shared_ptr<const AnalyticForm>& form() const { return form_; }
    const std::vector<StateComponent>& components() const { return components_; }
    const std::string& family() const { return family_; }
    const std::string& label() const { return label_; }
    std::optional<double> eigen_energy() const { return eigen_energy_; }
    std::optional<std::vector<int>> quantum_numbers() const;
    bool analytic_derivatives() const { return true; }
    std::size_t dim() const { return form_->dim(); }

    /// True when every component carries an eigen energy.
    bool is_eigen_superposition() const;

    /// Samples the closed form at time t (exact eigen-phase or free-packet
    /// evolution, depending on the family), scaled so the t = 0 sample has
    /// unit discrete norm. The result keeps its analytic backing.
    ComplexField sample(const Grid& grid, double t = 0.0) const;

    /// Factor that makes the t = 0 sample unit-norm on `grid`.
    double discrete_normalization(const Grid& grid) const;

    // Internal construction; use the catalog factories below.
    CatalogState(std::string family, std::string label, std::vector<StateComponent> components);

private:
    std::string family_;
    std::string label_;
    std::vector<StateComponent> components_;
    std::shared_ptr<const AnalyticForm> form_;
    std::optional<double> eigen_energy_;
};

/// Hydrogen eigenstate in atomic units; E_n = -1/(2 n^2).
CatalogState hydrogen_state(int n, int l, int m);

/// Box on which hydrogen states of principal number n are evaluated:
/// half-width 20 n^2 a.u. per axis.
Grid hydrogen_grid(int n, std::size_t points_per_axis);

/// exp(-|x - center|^2 / (4 sigma^2) + i k0.x), normalized. Its time
/// dependence is the exact free (V = 0) evolution with the model's masses.
CatalogState gaussian_packet(std::vector<double> center, double sigma, std::vector<double> k0, const Model& model);

/// Product of Hermite functions; E = hbar omega sum (n_i + 1/2).
CatalogState harmonic_eigenstate(std::vector<int> n_per_axis, double omega, const Model& model);

/// Normalized linear combination. All states must share a family.
CatalogState superpose(const std::vector<Complex>& coeffs, const std::vector<CatalogState>& states);

/// Closed-form overlap <a|b> of two terms of the same family at t = 0.
Complex component_overlap(const StateComponent& a, const StateComponent& b, const std::string& family);

} // namespace bornlab
