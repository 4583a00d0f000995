#pragma once

#include <array>
#include <functional>
#include <vector>

#include "bornlab/catalog.hpp"
#include "bornlab/field.hpp"
#include "bornlab/model.hpp"

namespace bornlab {

enum class EvolutionMethod { analytic, split_step };

struct EvolutionRecord {
    std::vector<double> times;
    std::vector<ComplexField> states;
    std::vector<double> norms;
    EvolutionMethod method = EvolutionMethod::analytic;
    double dt = 0.0;
};

/// sum_j c_j exp(-i E_j t / hbar) psi_j sampled on `grid`, with the same
/// discrete normalization factor as the t = 0 sample. Throws when a
/// component has no eigen energy.
ComplexField analytic_evolve(const CatalogState& state, const Grid& grid, double t);

EvolutionRecord analytic_record(const CatalogState& state, const Grid& grid, const std::vector<double>& times);

/// One Strang step: half potential, full kinetic (exact in Fourier space),
/// half potential. dt may be negative (backward evolution).
class SplitStepPropagator {
public:
    SplitStepPropagator(const Model& model, const Grid& grid, double dt);

    void step(std::vector<Complex>& psi) const;
    double dt() const { return dt_; }
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    double dt_;
    std::vector<Complex> half_potential_;
    std::vector<Complex> kinetic_;  // includes the 1/N inverse-FFT factor
};

/// Called after each completed step with (step index, time, amplitudes).
using StepObserver = std::function<void(std::size_t, double, const std::vector<Complex>&)>;

/// Evolves `steps` Strang steps of size dt > 0. Snapshots are kept at step 0,
/// every `stride` steps and the final step. Throws NumericalAbort (with the
/// step index) if the amplitudes stop being finite.
EvolutionRecord split_step(const ComplexField& state, const Model& model, double dt, std::size_t steps,
                           std::size_t stride = 1, const StepObserver& observer = {});

/// Three consecutive split-step snapshots centered at t_mid (t_mid - dt, t_mid, t_mid + dt).
std::array<ComplexField, 3> split_step_triple(const ComplexField& state, const Model& model, double dt, double t_mid);

} // namespace bornlab
