#include "bornlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bornlab/calculus.hpp"
#include "bornlab/spectral.hpp"

namespace bornlab {

namespace {

std::vector<double> density_of(const ComplexField& state)
{
    std::vector<double> rho(state.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(state[i]);
    return rho;
}

// Shared body-velocity computation: numerator(conj(psi) d psi) / rho.
template <typename F>
RandomVariable body_velocity(const ComplexField& state, const Model& model, std::size_t body, F part)
{
    model.check_grid(state.grid(), "velocity");
    model.check_body(body, "velocity");
    const NodeMask nm = node_mask(state);
    const std::vector<double> rho = density_of(state);
    RandomVariable rv;
    rv.grid = state.grid();
    rv.mask = nm.mask;
    const Derivatives der = differentiate(state, false);
    for (std::size_t axis : model.body_axes(body)) {
        const ComplexField& d = der.first[axis];
        const double k = model.hbar / model.mass_of_axis(axis);
        std::vector<double> c(state.size(), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (nm.mask[i]) c[i] = k * part(std::conj(state[i]) * d[i]) / rho[i];
        }
        rv.components.push_back(std::move(c));
    }
    return rv;
}

} // namespace

NodeMask node_mask(const ComplexField& state, double threshold)
{
    const std::vector<double> rho = density_of(state);
    const double peak = rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
    if (!(peak > 0.0)) throw std::invalid_argument("node_mask: state vanishes identically");
    NodeMask nm;
    nm.threshold = threshold;
    nm.mask.assign(rho.size(), 1);
    const double cut = threshold * peak;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] < cut) {
            nm.mask[i] = 0;
            ++nm.masked_cells;
        }
    }
    const double vol = state.grid().cell_volume();
    const double total = pairwise_sum(std::span<const double>(rho)) * vol;
    nm.masked_mass = pairwise_sum_of<double>(0, rho.size(), [&](std::size_t i) { return nm.mask[i] ? 0.0 : rho[i]; })
                     * vol / total;
    if (nm.masked_mass > kMaskedMassLimit) {
        throw std::invalid_argument("node_mask: masked cells carry mass " + std::to_string(nm.masked_mass)
                                    + " > 1e-9");
    }
    return nm;
}

RandomVariable drift_velocity(const ComplexField& state, const Model& model, std::size_t body)
{
    return body_velocity(state, model, body, [](Complex c) { return c.imag(); });
}

RandomVariable osmotic_velocity(const ComplexField& state, const Model& model, std::size_t body)
{
    // grad rho = 2 Re(conj(psi) grad psi), so u = (hbar/m) Re(conj(psi) grad psi) / rho.
    return body_velocity(state, model, body, [](Complex c) { return c.real(); });
}

ComplexField apply_hamiltonian(const ComplexField& state, const Model& model)
{
    model.check_grid(state.grid(), "apply_hamiltonian");
    const Grid& g = state.grid();
    std::vector<Complex> out(g.size());
    const RealField v = model.potential_field(g);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v.values[i] * state[i];
    for (std::size_t b = 0; b < model.bodies; ++b) {
        const auto axes = model.body_axes(b);
        const ComplexField lap = laplacian(state, axes);
        const double k = -model.hbar * model.hbar / (2.0 * model.masses[b]);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += k * lap[i];
    }
    return ComplexField(g, std::move(out));
}

RandomVariable energy_rv(const ComplexField& state, const Model& model)
{
    const NodeMask nm = node_mask(state);
    const ComplexField h = apply_hamiltonian(state, model);
    std::vector<double> e(state.size(), 0.0);
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!nm.mask[i]) continue;
        if (!std::isfinite(h[i].real()) || !std::isfinite(h[i].imag())) {
            throw std::invalid_argument("energy_rv: H psi is not finite at an unmasked cell (unbounded V?)");
        }
        e[i] = (std::conj(state[i]) * h[i]).real() / std::norm(state[i]);
    }
    return RandomVariable::scalar(state.grid(), std::move(e), nm.mask);
}

RealField quantum_potential(const ComplexField& state, const Model& model)
{
    model.check_grid(state.grid(), "quantum_potential");
    const Grid& g = state.grid();
    const NodeMask nm = node_mask(state);
    RealField q(g);
    q.mask = nm.mask;
    std::vector<double> body_coeff(model.bodies);
    for (std::size_t b = 0; b < model.bodies; ++b) body_coeff[b] = -model.hbar * model.hbar / (2.0 * model.masses[b]);

    if (state.has_backing()) {
        const AnalyticBacking& bk = *state.backing();
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!nm.mask[i]) continue;
            const auto x = g.point(i);
            const Jet2 psi = bk.form->jet2(std::span(x.data(), g.dim()), bk.time, false) * bk.scale;
            const Jet2 re = real_part(psi);
            const Jet2 im = imag_part(psi);
            const Jet2 s = sqrt(re * re + im * im);
            double acc = 0.0;
            for (std::size_t a = 0; a < g.dim(); ++a) {
                const int ai = static_cast<int>(a);
                acc += body_coeff[model.body_of_axis(a)] * s.d(ai, ai).real();
            }
            q.values[i] = acc / s.value().real();
        }
        return q;
    }
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) s[i] = std::abs(state[i]);
    std::vector<double> acc(g.size(), 0.0);
    for (std::size_t a = 0; a < g.dim(); ++a) {
        spectral::Orders o{};
        o[a] = 2;
        const auto d2 = spectral::derivative(g, std::span<const double>(s), o);
        const double k = body_coeff[model.body_of_axis(a)];
        for (std::size_t i = 0; i < g.size(); ++i) acc[i] += k * d2[i];
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (nm.mask[i]) q.values[i] = acc[i] / s[i];
    }
    return q;
}

RandomVariable energy_rv_madelung(const ComplexField& state, const Model& model)
{
    const RealField q = quantum_potential(state, model);
    const RealField v = model.potential_field(state.grid());
    std::vector<double> e(state.size(), 0.0);
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (q.mask[i]) e[i] = v.values[i] + q.values[i];
    }
    for (std::size_t b = 0; b < model.bodies; ++b) {
        const RandomVariable vb = drift_velocity(state, model, b);
        for (const auto& comp : vb.components) {
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (q.mask[i]) e[i] += 0.5 * model.masses[b] * comp[i] * comp[i];
            }
        }
    }
    return RandomVariable::scalar(state.grid(), std::move(e), q.mask);
}

RandomVariable angular_momentum(const ComplexField& state, const Model& model, std::size_t body,
                                std::array<double, 3> r0)
{
    if (model.dims_per_body != 3) throw std::invalid_argument("angular_momentum: body coordinates must be 3D");
    const RandomVariable v = drift_velocity(state, model, body);
    const Grid& g = state.grid();
    const auto axes = model.body_axes(body);
    const double m = model.masses[body];
    RandomVariable l;
    l.grid = g;
    l.mask = v.mask;
    l.components.assign(3, std::vector<double>(g.size(), 0.0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!v.mask[i]) continue;
        std::array<double, 3> r{};
        std::array<double, 3> p{};
        for (int k = 0; k < 3; ++k) {
            r[k] = g.coordinate(axes[k], g.axis_index(i, axes[k])) - r0[k];
            p[k] = m * v.components[k][i];
        }
        l.components[0][i] = r[1] * p[2] - r[2] * p[1];
        l.components[1][i] = r[2] * p[0] - r[0] * p[2];
        l.components[2][i] = r[0] * p[1] - r[1] * p[0];
    }
    return l;
}

std::vector<Complex> qm_momentum_expect(const ComplexField& state, const Model& model, std::size_t body)
{
    model.check_grid(state.grid(), "qm_momentum_expect");
    model.check_body(body, "qm_momentum_expect");
    std::vector<Complex> out;
    const Derivatives der = differentiate(state, false);
    for (std::size_t axis : model.body_axes(body)) {
        const ComplexField& d = der.first[axis];
        out.push_back(Complex(0.0, -model.hbar) * inner_product(state, d));
    }
    return out;
}

double qm_energy_expect(const ComplexField& state, const Model& model)
{
    return inner_product(state, apply_hamiltonian(state, model)).real();
}

std::vector<double> qm_momentum_square(const ComplexField& state, const Model& model, std::size_t body)
{
    model.check_grid(state.grid(), "qm_momentum_square");
    model.check_body(body, "qm_momentum_square");
    std::vector<double> out;
    const Derivatives der = differentiate(state, false);
    for (std::size_t axis : model.body_axes(body)) {
        const ComplexField& d = der.first[axis];
        out.push_back(model.hbar * model.hbar * inner_product(d, d).real());
    }
    return out;
}

std::vector<double> qm_momentum_square_operator(const ComplexField& state, const Model& model, std::size_t body)
{
    model.check_grid(state.grid(), "qm_momentum_square_operator");
    model.check_body(body, "qm_momentum_square_operator");
    std::vector<double> out;
    for (std::size_t axis : model.body_axes(body)) {
        const std::size_t one[] = {axis};
        const ComplexField d2 = laplacian(state, one);
        out.push_back(-model.hbar * model.hbar * inner_product(state, d2).real());
    }
    return out;
}

} // namespace bornlab
