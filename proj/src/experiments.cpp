#include "bornlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "bornlab/calculus.hpp"
#include "bornlab/errors.hpp"
#include "bornlab/observables.hpp"
#include "bornlab/probability.hpp"
#include "bornlab/propagator.hpp"
#include "bornlab/spectral.hpp"

namespace bornlab {

// ---------------------------------------------------------------- double slit

void DoubleSlitConfig::validate() const
{
    auto fail = [](const std::string& m) { throw std::invalid_argument("double-slit config: " + m); };
    const double top = slit_separation / 2 + slit_width / 2;
    if (!(sigma > 0.0) || !(mass > 0.0) || !(hbar > 0.0)) fail("sigma, mass and hbar must be positive");
    if (!(dt > 0.0) || steps == 0 || flux_stride == 0) fail("dt, steps and flux_stride must be positive");
    if (steps % flux_stride != 0) fail("steps must be a multiple of flux_stride");
    if (!(x_range.lo < x0 && x0 < barrier_x)) fail("packet must start inside the domain, upstream of the wall");
    if (!(detector_x > barrier_x + thickness && detector_x < x_range.hi)) {
        fail("detector must lie strictly downstream of the wall and inside the domain");
    }
    if (!(y_range.lo < -top && top < y_range.hi)) fail("slits must lie inside the y range");
    if (bins == 0 || ny % bins != 0) fail("bins must divide ny");
    if (!(fringe_fraction >= 0.0 && fringe_fraction < 1.0)) fail("fringe_fraction must be in [0, 1)");
}

Grid DoubleSlitConfig::grid() const { return Grid::make({x_range, y_range}, {nx, ny}); }

Model DoubleSlitConfig::model(SlitSelection which) const
{
    return double_slit_model(barrier_x, {-slit_separation / 2, slit_separation / 2}, slit_width, barrier_height, which,
                             thickness, mass, hbar);
}

DetectorHistogram run_slit(const DoubleSlitConfig& cfg, SlitSelection which)
{
    cfg.validate();
    const Grid g = cfg.grid();
    const Model model = cfg.model(which);
    ComplexField init = gaussian_packet({cfg.x0, cfg.y0}, cfg.sigma, {cfg.k0, 0.0}, model).sample(g);
    init.drop_backing();
    const SplitStepPropagator prop(model, g, cfg.dt);

    const double probe[] = {cfg.detector_x, 0.0};
    const std::size_t ix = g.axis_index(g.locate(probe), 0);
    const std::size_t ny = g.points(1);
    const std::size_t sx = g.stride(0), sy = g.stride(1);
    const double k = cfg.hbar / cfg.mass;

    std::vector<double> flux(ny, 0.0);
    std::vector<Complex> psi(init.values().begin(), init.values().end());
    auto accumulate = [&](double weight) {
        const auto dx = spectral::derivative(g, psi, spectral::Orders{1, 0, 0});
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t i = ix * sx + j * sy;
            flux[j] += weight * k * (std::conj(psi[i]) * dx[i]).imag();
        }
    };
    const double w = cfg.dt * static_cast<double>(cfg.flux_stride);
    accumulate(0.5 * w);
    for (std::size_t s = 1; s <= cfg.steps; ++s) {
        prop.step(psi);
        if (s % cfg.flux_stride != 0) continue;
        double norm = 0.0;
        for (Complex c : psi) norm += std::norm(c);
        if (!std::isfinite(norm)) throw NumericalAbort(s, "double-slit: non-finite amplitudes");
        accumulate(s == cfg.steps ? 0.5 * w : w);
    }

    DetectorHistogram h;
    h.flux_per_cell = flux;
    const double dy = g.spacing(1);
    double pos = 0.0, neg = 0.0;
    for (double f : flux) (f > 0 ? pos : neg) += std::abs(f) * dy;
    h.transmitted_mass = pos;
    h.net_flux_mass = pos - neg;
    h.clipped_fraction = pos + neg > 0 ? neg / (pos + neg) : 0.0;

    // Mass left of the detector line; the detector column counts half.
    double up = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t a = g.axis_index(i, 0);
        if (a < ix) up += std::norm(psi[i]);
        else if (a == ix) up += 0.5 * std::norm(psi[i]);
    }
    h.upstream_mass = up * g.cell_volume();
    h.mass_balance = h.net_flux_mass + h.upstream_mass;

    if (h.transmitted_mass < 1e-3) {
        throw std::runtime_error("double-slit: packet never reached the detector (transmitted mass "
                                 + std::to_string(h.transmitted_mass) + " < 1e-3)");
    }
    const std::size_t per_bin = ny / cfg.bins;
    const double len = cfg.y_range.hi - cfg.y_range.lo;
    for (std::size_t b = 0; b <= cfg.bins; ++b) {
        h.bin_edges.push_back(cfg.y_range.lo + len * static_cast<double>(b) / static_cast<double>(cfg.bins));
    }
    h.mass_per_bin.assign(cfg.bins, 0.0);
    for (std::size_t j = 0; j < ny; ++j) h.mass_per_bin[j / per_bin] += std::max(flux[j], 0.0) * dy / pos;
    return h;
}

int count_maxima(const std::vector<double>& h, double fraction)
{
    if (h.empty()) return 0;
    const double peak = *std::max_element(h.begin(), h.end());
    int count = 0;
    std::size_t i = 0;
    while (i < h.size()) {
        std::size_t j = i;
        while (j + 1 < h.size() && h[j + 1] == h[i]) ++j;  // plateau [i, j]
        const bool left_ok = i == 0 || h[i - 1] < h[i];
        const bool right_ok = j + 1 == h.size() || h[j + 1] < h[j];
        if (left_ok && right_ok && h[i] >= fraction * peak && h[i] > 0.0) ++count;
        i = j + 1;
    }
    return count;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("l1_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double mirror_difference(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("mirror_difference: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[a.size() - 1 - i]);
    return s;
}

DoubleSlitResult run_double_slit(const DoubleSlitConfig& cfg)
{
    cfg.validate();
    auto both = std::async(std::launch::async, run_slit, cfg, SlitSelection::both);
    auto left = std::async(std::launch::async, run_slit, cfg, SlitSelection::left);
    auto right = std::async(std::launch::async, run_slit, cfg, SlitSelection::right);
    DoubleSlitResult r;
    r.both = both.get();
    r.left = left.get();
    r.right = right.get();
    r.mixture.resize(cfg.bins);
    for (std::size_t b = 0; b < cfg.bins; ++b) r.mixture[b] = 0.5 * (r.left.mass_per_bin[b] + r.right.mass_per_bin[b]);
    r.distance = l1_distance(r.both.mass_per_bin, r.mixture);
    r.mirror_difference = mirror_difference(r.left.mass_per_bin, r.right.mass_per_bin);
    r.double_maxima = count_maxima(r.both.mass_per_bin, cfg.fringe_fraction);
    r.mixture_maxima = count_maxima(r.mixture, cfg.fringe_fraction);
    return r;
}

// ---------------------------------------------------------------- moments

const MomentRow& MomentTable::find(const std::string& observable, int order) const
{
    for (const auto& r : rows) {
        if (r.observable == observable && r.order == order) return r;
    }
    throw std::out_of_range("moment table has no row " + observable + " k=" + std::to_string(order));
}

namespace {

double closed_form_energy_moment(const CatalogState& state, int k)
{
    const auto& comps = state.components();
    Complex num{}, den{};
    for (const auto& a : comps) {
        for (const auto& b : comps) {
            const Complex w = std::conj(a.coeff) * b.coeff * component_overlap(a, b, state.family());
            num += w * std::pow(*b.energy, k);
            den += w;
        }
    }
    return (num / den).real();
}

// <H^a psi, H^b psi> with a + b = k; repeated applications use the grid
// Hamiltonian once the closed form has been consumed.
double grid_energy_moment(const ComplexField& f, const Model& model, int k)
{
    std::vector<ComplexField> powers{f};
    const int top = (k + 1) / 2;
    for (int j = 1; j <= top; ++j) powers.push_back(apply_hamiltonian(powers.back(), model));
    return inner_product(powers[k / 2], powers[top]).real();
}

void add_row(MomentTable& t, std::string obs, int k, double kol, double qm, std::string src)
{
    t.rows.push_back(MomentRow{std::move(obs), k, kol, qm, std::abs(kol - qm), std::move(src)});
}

} // namespace

MomentTable moment_divergence_report(const CatalogState& state, const Model& model, const Grid& grid, int k_max,
                                     double t)
{
    if (k_max < 1) throw std::invalid_argument("moment_divergence_report: k_max must be >= 1");
    const ComplexField f = state.sample(grid, t);
    const auto measure = born_measure(f);
    MomentTable table;

    const RandomVariable e = energy_rv(f, model);
    for (int k = 1; k <= k_max; ++k) {
        const double kol = expectation(e, measure, k)[0];
        if (k == 1) add_row(table, "energy", k, kol, qm_energy_expect(f, model), "grid");
        else if (state.is_eigen_superposition()) add_row(table, "energy", k, kol, closed_form_energy_moment(state, k), "closed-form");
        else add_row(table, "energy", k, kol, grid_energy_moment(f, model, k), "grid");
    }

    for (std::size_t a = 0; a < grid.dim(); ++a) {
        const std::size_t axes[] = {a};
        const RandomVariable x = position_rv(grid, axes);
        for (int k = 1; k <= k_max; ++k) {
            std::vector<Complex> xf(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) xf[i] = std::pow(x.components[0][i], k) * f[i];
            const double qm = inner_product(f, ComplexField(grid, std::move(xf))).real();
            add_row(table, "position[" + std::to_string(a) + "]", k, expectation(x, measure, k)[0], qm, "grid");
        }
    }

    for (std::size_t body = 0; body < model.bodies; ++body) {
        const RandomVariable v = drift_velocity(f, model, body);
        const auto p1 = qm_momentum_expect(f, model, body);
        const auto p2 = qm_momentum_square(f, model, body);
        const auto axes = model.body_axes(body);
        for (std::size_t c = 0; c < axes.size(); ++c) {
            const double m = model.mass_of_axis(axes[c]);
            RandomVariable p{grid, {v.components[c]}, v.mask};
            for (double& val : p.components[0]) val *= m;
            const std::string name = "momentum[" + std::to_string(axes[c]) + "]";
            add_row(table, name, 1, expectation(p, measure, 1)[0], p1[c].real(), "grid");
            add_row(table, name, 2, expectation(p, measure, 2)[0], p2[c], "grid");
        }
    }
    return table;
}

// ---------------------------------------------------------------- uncertainty

std::vector<UncertaintyAxis> uncertainty_report(const ComplexField& state, const Model& model, std::size_t body)
{
    model.check_body(body, "uncertainty_report");
    const Grid& g = state.grid();
    const auto measure = born_measure(state);
    const RandomVariable v = drift_velocity(state, model, body);
    const RandomVariable u = osmotic_velocity(state, model, body);
    const auto p1 = qm_momentum_expect(state, model, body);
    const auto p2 = qm_momentum_square(state, model, body);
    const auto axes = model.body_axes(body);
    std::vector<UncertaintyAxis> out;
    for (std::size_t c = 0; c < axes.size(); ++c) {
        const double m = model.mass_of_axis(axes[c]);
        const std::size_t one[] = {axes[c]};
        UncertaintyAxis r;
        r.axis = axes[c];
        r.sigma_x = std::sqrt(expectation(position_rv(g, one), measure, 2, true)[0]);
        const double var_p = p2[c] - p1[c].real() * p1[c].real();
        r.sigma_p_qm = std::sqrt(std::max(var_p, 0.0));
        const double var_v = expectation(RandomVariable{g, {v.components[c]}, v.mask}, measure, 2, true)[0];
        const double eu2 = expectation(RandomVariable{g, {u.components[c]}, u.mask}, measure, 2)[0];
        r.m_sigma_v = m * std::sqrt(std::max(var_v, 0.0));
        r.m_sigma_u = m * std::sqrt(eu2);
        r.qm_product = r.sigma_x * r.sigma_p_qm;
        r.drift_product = r.sigma_x * r.m_sigma_v;
        r.decomposition_residual = std::abs(var_p - m * m * (var_v + eu2));
        r.decomposition_relative = r.decomposition_residual / std::max({1.0, std::abs(var_p)});
        out.push_back(r);
    }
    return out;
}

} // namespace bornlab
