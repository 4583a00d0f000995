#include "bornlab/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "bornlab/calculus.hpp"
#include "bornlab/errors.hpp"
#include "bornlab/spectral.hpp"

namespace bornlab {

ComplexField analytic_evolve(const CatalogState& state, const Grid& grid, double t)
{
    if (!state.is_eigen_superposition()) {
        throw std::invalid_argument("analytic_evolve: state '" + state.label()
                                    + "' has a component without an eigen energy");
    }
    return state.sample(grid, t);
}

EvolutionRecord analytic_record(const CatalogState& state, const Grid& grid, const std::vector<double>& times)
{
    EvolutionRecord rec;
    rec.method = EvolutionMethod::analytic;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("analytic_record: times must increase");
        rec.states.push_back(analytic_evolve(state, grid, times[i]));
        rec.norms.push_back(l2_norm(rec.states.back()));
        rec.times.push_back(times[i]);
    }
    return rec;
}

SplitStepPropagator::SplitStepPropagator(const Model& model, const Grid& grid, double dt)
    : grid_(grid), dt_(dt)
{
    model.check_grid(grid, "split_step");
    spectral::require_spectral(grid, "split_step");
    if (!(dt != 0.0) || !std::isfinite(dt)) throw std::invalid_argument("split_step: dt must be finite and nonzero");
    const RealField v = model.potential_field(grid);
    half_potential_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(v.values[i])) throw std::invalid_argument("split_step: potential is unbounded on the grid");
        half_potential_[i] = std::exp(Complex(0.0, -0.5 * dt * v.values[i] / model.hbar));
    }
    kinetic_.resize(grid.size());
    const double inv_n = 1.0 / static_cast<double>(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const double k = spectral::wavenumber(grid, a, grid.axis_index(i, a));
            t += model.hbar * k * k / (2.0 * model.mass_of_axis(a));
        }
        kinetic_[i] = inv_n * std::exp(Complex(0.0, -dt * t));
    }
}

void SplitStepPropagator::step(std::vector<Complex>& psi) const
{
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_potential_[i];
    spectral::fft(psi, grid_.shape(), -1);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kinetic_[i];
    spectral::fft(psi, grid_.shape(), +1);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_potential_[i];
}

EvolutionRecord split_step(const ComplexField& state, const Model& model, double dt, std::size_t steps,
                           std::size_t stride, const StepObserver& observer)
{
    if (!(dt > 0.0)) throw std::invalid_argument("split_step: dt must be positive");
    if (stride == 0) throw std::invalid_argument("split_step: stride must be positive");
    const Grid& grid = state.grid();
    SplitStepPropagator prop(model, grid, dt);
    EvolutionRecord rec;
    rec.method = EvolutionMethod::split_step;
    rec.dt = dt;
    std::vector<Complex> psi(state.values().begin(), state.values().end());
    auto keep = [&](double t) {
        ComplexField f(grid, psi);
        rec.norms.push_back(l2_norm(f));
        rec.times.push_back(t);
        rec.states.push_back(std::move(f));
    };
    keep(0.0);
    for (std::size_t s = 1; s <= steps; ++s) {
        prop.step(psi);
        const double t = static_cast<double>(s) * dt;
        const double n = pairwise_sum_of<double>(0, psi.size(), [&](std::size_t i) { return std::norm(psi[i]); });
        if (!std::isfinite(n)) throw NumericalAbort(s, "split_step: non-finite amplitudes");
        if (observer) observer(s, t, psi);
        if (s % stride == 0 || s == steps) keep(t);
    }
    return rec;
}

std::array<ComplexField, 3> split_step_triple(const ComplexField& state, const Model& model, double dt, double t_mid)
{
    const double steps_to_mid = std::round(t_mid / dt);
    if (steps_to_mid < 1.0 || std::abs(steps_to_mid * dt - t_mid) > 1e-9 * std::max(1.0, t_mid)) {
        throw std::invalid_argument("split_step_triple: t_mid must be a positive multiple of dt");
    }
    const auto mid = static_cast<std::size_t>(steps_to_mid);
    std::array<ComplexField, 3> out;
    const StepObserver grab = [&](std::size_t s, double, const std::vector<Complex>& psi) {
        if (s + 1 >= mid && s <= mid + 1) out[s + 1 - mid] = ComplexField(state.grid(), psi);
    };
    if (mid == 1) out[0] = ComplexField(state.grid(), std::vector<Complex>(state.values().begin(), state.values().end()));
    split_step(state, model, dt, mid + 1, mid + 1, grab);
    return out;
}

} // namespace bornlab
