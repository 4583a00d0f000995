#include "bornlab/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bornlab/jet.hpp"
#include "bornlab/spectral.hpp"

namespace bornlab {

std::string to_string(ResidualEquation e)
{
    switch (e) {
    case ResidualEquation::continuity: return "continuity";
    case ResidualEquation::force: return "force";
    case ResidualEquation::vorticity: return "vorticity";
    }
    return "?";
}

ResidualEquation residual_equation_from_string(const std::string& s)
{
    if (s == "continuity") return ResidualEquation::continuity;
    if (s == "force") return ResidualEquation::force;
    if (s == "vorticity") return ResidualEquation::vorticity;
    throw std::invalid_argument("unknown residual equation '" + s + "'");
}

namespace {

// Amplitude and spatial derivatives on the grid; optionally Psi_{a b b}
// (third[a * d + b]) and the time derivatives Psi_t, Psi_{a t}.
struct PsiData {
    std::size_t d = 0;
    std::vector<Complex> psi;
    std::vector<std::vector<Complex>> first;
    std::vector<std::vector<Complex>> second;  // full, [a * d + b]
    std::vector<std::vector<Complex>> third;
    std::vector<Complex> t;
    std::vector<std::vector<Complex>> first_t;

    Complex d1(std::size_t a, std::size_t i) const { return first[a][i]; }
    Complex d2(std::size_t a, std::size_t b, std::size_t i) const { return second[a * d + b][i]; }
};

PsiData analytic_data(const ComplexField& f, bool want_second, bool want_third, bool want_time)
{
    const Grid& g = f.grid();
    const AnalyticBacking& bk = *f.backing();
    PsiData p;
    p.d = g.dim();
    const std::size_t d = p.d, n = g.size();
    p.psi.assign(f.values().begin(), f.values().end());
    p.first.assign(d, std::vector<Complex>(n));
    if (want_second) p.second.assign(d * d, std::vector<Complex>(n));
    if (want_third) p.third.assign(d * d, std::vector<Complex>(n));
    if (want_time) {
        p.t.resize(n);
        p.first_t.assign(d, std::vector<Complex>(n));
    }
    const int ti = static_cast<int>(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = g.point(i);
        const std::span<const double> xs(x.data(), d);
        auto fill = [&](const auto& j) {
            for (std::size_t a = 0; a < d; ++a) {
                const int ia = static_cast<int>(a);
                p.first[a][i] = bk.scale * j.d(ia);
                for (std::size_t b = 0; b < d && want_second; ++b) {
                    p.second[a * d + b][i] = bk.scale * j.d(ia, static_cast<int>(b));
                }
                if (want_time) p.first_t[a][i] = bk.scale * j.d(ia, ti);
            }
            if (want_time) p.t[i] = bk.scale * j.d(ti);
        };
        if (want_third) {
            const Jet3 j = bk.form->jet3(xs, bk.time, want_time);
            fill(j);
            for (std::size_t a = 0; a < d; ++a) {
                for (std::size_t b = 0; b < d; ++b) {
                    const int ib = static_cast<int>(b);
                    p.third[a * d + b][i] = bk.scale * j.d(static_cast<int>(a), ib, ib);
                }
            }
        } else {
            fill(bk.form->jet2(xs, bk.time, want_time));
        }
    }
    return p;
}

PsiData spectral_data(const ComplexField& f, bool want_second, bool want_third)
{
    const Grid& g = f.grid();
    spectral::require_spectral(g, "madelung residual");
    PsiData p;
    p.d = g.dim();
    const std::size_t d = p.d;
    p.psi.assign(f.values().begin(), f.values().end());
    std::vector<Complex> hat = p.psi;
    spectral::fft(hat, g.shape(), -1);
    for (std::size_t a = 0; a < d; ++a) {
        spectral::Orders o{};
        o[a] = 1;
        p.first.push_back(spectral::apply_multiplier(g, hat, o));
    }
    if (want_second) {
        p.second.resize(d * d);
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = a; b < d; ++b) {
                spectral::Orders o{};
                o[a] += 1;
                o[b] += 1;
                p.second[a * d + b] = spectral::apply_multiplier(g, hat, o);
                if (b != a) p.second[b * d + a] = p.second[a * d + b];
            }
        }
    }
    if (want_third) {
        p.third.resize(d * d);
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                spectral::Orders o{};
                o[a] += 1;
                o[b] += 2;
                p.third[a * d + b] = spectral::apply_multiplier(g, hat, o);
            }
        }
    }
    return p;
}

PsiData psi_data(const ComplexField& f, bool want_second, bool want_third)
{
    return f.has_backing() ? analytic_data(f, want_second, want_third, false) : spectral_data(f, want_second, want_third);
}

void mark_mask(const ComplexField& f, double threshold, std::vector<std::uint8_t>& mask)
{
    double peak = 0.0;
    for (Complex c : f.values()) peak = std::max(peak, std::norm(c));
    if (!(peak > 0.0)) throw std::invalid_argument("madelung residual: state vanishes identically");
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::norm(f[i]) < threshold * peak) mask[i] = 0;
    }
}

void check_snapshots(const std::array<ComplexField, 3>& s, double dt, const Model& model)
{
    if (!(dt > 0.0)) throw std::invalid_argument("madelung residual: dt must be positive");
    for (const auto& f : s) {
        require_same_grid(s[1].grid(), f.grid(), "madelung residual");
        model.check_grid(f.grid(), "madelung residual");
    }
}

double max_spacing(const Grid& g)
{
    double h = 0.0;
    for (std::size_t a = 0; a < g.dim(); ++a) h = std::max(h, g.spacing(a));
    return h;
}

// Accumulates residual components into the report norms.
class Norms {
public:
    Norms(const Grid& g, const std::vector<std::uint8_t>& mask) : grid_(g), mask_(mask) {}

    void add(const std::vector<double>& r)
    {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!mask_[i]) continue;
            sq_.push_back(r[i] * r[i]);
            max_ = std::max(max_, std::abs(r[i]));
        }
    }

    ResidualReport report(ResidualEquation eq, double dt) const
    {
        ResidualReport rep;
        rep.equation = eq;
        rep.norm_l2 = std::sqrt(pairwise_sum(std::span<const double>(sq_)) * grid_.cell_volume());
        rep.norm_max = max_;
        rep.h = max_spacing(grid_);
        rep.dt = dt;
        const auto masked = static_cast<double>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
        rep.masked_fraction = masked / static_cast<double>(mask_.size());
        rep.reliable = rep.masked_fraction < 0.2;
        return rep;
    }

private:
    const Grid& grid_;
    const std::vector<std::uint8_t>& mask_;
    std::vector<double> sq_;
    double max_ = 0.0;
};

// Spatial part of the continuity residual: sum_a (hbar/m_a) Im(conj(psi) psi_aa).
double transport(const PsiData& p, const Model& model, std::size_t i)
{
    double s = 0.0;
    for (std::size_t a = 0; a < p.d; ++a) {
        s += model.hbar / model.mass_of_axis(a) * (std::conj(p.psi[i]) * p.d2(a, a, i)).imag();
    }
    return s;
}

double velocity(const PsiData& p, const Model& model, std::size_t a, std::size_t i)
{
    return model.hbar / model.mass_of_axis(a) * (p.d1(a, i) / p.psi[i]).imag();
}

// d_b v^a = (hbar/m_a) Im(psi_ab/psi - psi_a psi_b / psi^2)
double velocity_gradient(const PsiData& p, const Model& model, std::size_t a, std::size_t b, std::size_t i)
{
    const Complex q = p.psi[i];
    return model.hbar / model.mass_of_axis(a) * (p.d2(a, b, i) / q - p.d1(a, i) * p.d1(b, i) / (q * q)).imag();
}

// d_a Q with Q = -sum_b (hbar^2/2m_b) Lap_b sqrt(rho)/sqrt(rho), written in
// terms of psi: d_bb s / s = Re(psi_bb/psi) + Im(psi_b/psi)^2.
double quantum_force(const PsiData& p, const Model& model, std::size_t a, std::size_t i)
{
    const Complex q = p.psi[i];
    double s = 0.0;
    for (std::size_t b = 0; b < p.d; ++b) {
        const Complex wb = p.d1(b, i) / q;
        const Complex d_a_wbb = p.third[a * p.d + b][i] / q - p.d2(b, b, i) * p.d1(a, i) / (q * q);
        const Complex d_a_wb = p.d2(a, b, i) / q - p.d1(b, i) * p.d1(a, i) / (q * q);
        s -= model.hbar * model.hbar / (2.0 * model.mass_of_axis(b)) * (d_a_wbb.real() + 2.0 * wb.imag() * d_a_wb.imag());
    }
    return s;
}

std::vector<std::vector<double>> potential_gradient(const Grid& g, const Model& model)
{
    const std::size_t d = g.dim();
    std::vector<std::vector<double>> out(d, std::vector<double>(g.size()));
    if (model.potential.gradient) {
        std::array<double, kMaxDim> gr{};
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.point(i);
            model.potential.gradient(std::span<const double>(x.data(), d), std::span<double>(gr.data(), d));
            for (std::size_t a = 0; a < d; ++a) out[a][i] = gr[a];
        }
        return out;
    }
    const RealField v = model.potential_field(g);
    for (std::size_t a = 0; a < d; ++a) {
        spectral::Orders o{};
        o[a] = 1;
        out[a] = spectral::derivative(g, v.values, o);
    }
    return out;
}

ResidualReport force_from(const PsiData& p, const std::vector<std::vector<double>>& dv_dt, const Grid& g,
                          const std::vector<std::uint8_t>& mask, const Model& model, std::size_t body, double dt)
{
    const auto grad_v = potential_gradient(g, model);
    Norms norms(g, mask);
    for (std::size_t a : model.body_axes(body)) {
        std::vector<double> r(g.size(), 0.0);
        const double m = model.mass_of_axis(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!mask[i]) continue;
            double adv = 0.0;
            for (std::size_t b = 0; b < p.d; ++b) adv += velocity(p, model, b, i) * velocity_gradient(p, model, a, b, i);
            r[i] = m * (dv_dt[a][i] + adv) + grad_v[a][i] + quantum_force(p, model, a, i);
        }
        norms.add(r);
    }
    return norms.report(ResidualEquation::force, dt);
}

} // namespace

ResidualReport continuity_residual(const std::array<ComplexField, 3>& s, double dt, const Model& model,
                                   ResidualOptions opt)
{
    check_snapshots(s, dt, model);
    const Grid& g = s[1].grid();
    std::vector<std::uint8_t> mask(g.size(), 1);
    for (const auto& f : s) mark_mask(f, opt.threshold, mask);
    const PsiData p = psi_data(s[1], true, false);
    std::vector<double> r(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!mask[i]) continue;
        r[i] = (std::norm(s[2][i]) - std::norm(s[0][i])) / (2.0 * dt) + transport(p, model, i);
    }
    Norms norms(g, mask);
    norms.add(r);
    return norms.report(ResidualEquation::continuity, dt);
}

ResidualReport force_residual(const std::array<ComplexField, 3>& s, double dt, const Model& model, std::size_t body,
                              ResidualOptions opt)
{
    check_snapshots(s, dt, model);
    model.check_body(body, "force_residual");
    const Grid& g = s[1].grid();
    std::vector<std::uint8_t> mask(g.size(), 1);
    for (const auto& f : s) mark_mask(f, opt.threshold, mask);
    const PsiData p = psi_data(s[1], true, true);
    const PsiData before = psi_data(s[0], false, false);
    const PsiData after = psi_data(s[2], false, false);
    std::vector<std::vector<double>> dv_dt(g.dim(), std::vector<double>(g.size(), 0.0));
    for (std::size_t a : model.body_axes(body)) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (mask[i]) dv_dt[a][i] = (velocity(after, model, a, i) - velocity(before, model, a, i)) / (2.0 * dt);
        }
    }
    return force_from(p, dv_dt, g, mask, model, body, dt);
}

ResidualReport continuity_residual_exact(const ComplexField& state, const Model& model, ResidualOptions opt)
{
    if (!state.has_backing()) throw std::invalid_argument("continuity_residual_exact: state has no closed form");
    model.check_grid(state.grid(), "continuity_residual_exact");
    const Grid& g = state.grid();
    std::vector<std::uint8_t> mask(g.size(), 1);
    mark_mask(state, opt.threshold, mask);
    const PsiData p = analytic_data(state, true, false, true);
    std::vector<double> r(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask[i]) r[i] = 2.0 * (std::conj(p.psi[i]) * p.t[i]).real() + transport(p, model, i);
    }
    Norms norms(g, mask);
    norms.add(r);
    return norms.report(ResidualEquation::continuity, 0.0);
}

ResidualReport force_residual_exact(const ComplexField& state, const Model& model, std::size_t body,
                                    ResidualOptions opt)
{
    if (!state.has_backing()) throw std::invalid_argument("force_residual_exact: state has no closed form");
    model.check_grid(state.grid(), "force_residual_exact");
    model.check_body(body, "force_residual_exact");
    const Grid& g = state.grid();
    std::vector<std::uint8_t> mask(g.size(), 1);
    mark_mask(state, opt.threshold, mask);
    const PsiData p = analytic_data(state, true, true, true);
    std::vector<std::vector<double>> dv_dt(g.dim(), std::vector<double>(g.size(), 0.0));
    for (std::size_t a : model.body_axes(body)) {
        const double k = model.hbar / model.mass_of_axis(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!mask[i]) continue;
            const Complex q = p.psi[i];
            dv_dt[a][i] = k * (p.first_t[a][i] / q - p.first[a][i] * p.t[i] / (q * q)).imag();
        }
    }
    return force_from(p, dv_dt, g, mask, model, body, 0.0);
}

VelocityGradient VelocityGradient::of_state(const ComplexField& state, const Model& model, ResidualOptions opt)
{
    model.check_grid(state.grid(), "vorticity_residual");
    const Grid& g = state.grid();
    const std::size_t d = g.dim();
    VelocityGradient vg;
    vg.grid = g;
    vg.mask.assign(g.size(), 1);
    mark_mask(state, opt.threshold, vg.mask);
    const PsiData p = psi_data(state, true, false);
    vg.jac.assign(d * d, std::vector<double>(g.size(), 0.0));
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (vg.mask[i]) vg.jac[a * d + b][i] = velocity_gradient(p, model, a, b, i);
            }
        }
    }
    return vg;
}

VelocityGradient VelocityGradient::from_function(
    const Grid& grid, const std::function<void(std::span<const double>, std::span<double>)>& f)
{
    const std::size_t d = grid.dim();
    VelocityGradient vg;
    vg.grid = grid;
    vg.mask.assign(grid.size(), 1);
    vg.jac.assign(d * d, std::vector<double>(grid.size(), 0.0));
    std::array<double, kMaxDim * kMaxDim> j{};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.point(i);
        f(std::span<const double>(x.data(), d), std::span<double>(j.data(), d * d));
        for (std::size_t k = 0; k < d * d; ++k) vg.jac[k][i] = j[k];
    }
    return vg;
}

ResidualReport vorticity_residual(const ComplexField& state, const Model& model, ResidualOptions opt)
{
    return vorticity_residual(VelocityGradient::of_state(state, model, opt), model);
}

ResidualReport vorticity_residual(const VelocityGradient& vg, const Model& model)
{
    model.check_grid(vg.grid, "vorticity_residual");
    const std::size_t d = vg.grid.dim();
    ResidualReport worst;
    bool first = true;
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            std::vector<double> r(vg.grid.size(), 0.0);
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (vg.mask[i]) {
                    r[i] = model.mass_of_axis(a) * vg.jac[a * d + b][i] - model.mass_of_axis(b) * vg.jac[b * d + a][i];
                }
            }
            Norms norms(vg.grid, vg.mask);
            norms.add(r);
            const ResidualReport rep = norms.report(ResidualEquation::vorticity, 0.0);
            if (first) {
                worst = rep;
                first = false;
            } else {
                worst.norm_l2 = std::max(worst.norm_l2, rep.norm_l2);
                worst.norm_max = std::max(worst.norm_max, rep.norm_max);
            }
        }
    }
    if (first) {
        // a single coordinate has no antisymmetric part
        Norms norms(vg.grid, vg.mask);
        worst = norms.report(ResidualEquation::vorticity, 0.0);
    }
    return worst;
}

ConvergenceResult convergence_study(const Model& model, const SnapshotBuilder& build,
                                    const std::vector<Resolution>& res, ResidualEquation equation, std::size_t body,
                                    ResidualOptions opt)
{
    if (res.size() < 3) throw std::invalid_argument("convergence_study: need at least 3 resolutions");
    const bool vary_dt = res[0].dt != res[1].dt;
    std::vector<double> xs;
    for (const auto& r : res) {
        if (r.points < 4 || !(r.dt > 0.0)) throw std::invalid_argument("convergence_study: invalid resolution");
        xs.push_back(vary_dt ? r.dt : 1.0 / static_cast<double>(r.points));
    }
    const double ratio = xs[1] / xs[0];
    if (!(ratio < 1.0)) throw std::invalid_argument("convergence_study: resolutions must refine");
    for (std::size_t k = 1; k < xs.size(); ++k) {
        if (std::abs(xs[k] / xs[k - 1] - ratio) > 1e-9 * ratio) {
            throw std::invalid_argument("convergence_study: refinement must be geometric");
        }
    }
    ConvergenceResult out;
    out.equation = equation;
    out.resolutions = res;
    for (const auto& r : res) {
        const auto snaps = build(r);
        switch (equation) {
        case ResidualEquation::continuity: out.reports.push_back(continuity_residual(snaps, r.dt, model, opt)); break;
        case ResidualEquation::force: out.reports.push_back(force_residual(snaps, r.dt, model, body, opt)); break;
        case ResidualEquation::vorticity: out.reports.push_back(vorticity_residual(snaps[1], model, opt)); break;
        }
    }
    out.saturated = std::all_of(out.reports.begin(), out.reports.end(),
                                [](const ResidualReport& r) { return r.norm_l2 <= 1e-10; });
    if (out.saturated) return out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double lx = std::log(xs[k]);
        const double ly = std::log(std::max(out.reports[k].norm_l2, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    out.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

} // namespace bornlab
