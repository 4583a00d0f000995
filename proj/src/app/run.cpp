#include "bornlab/app/run.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"

#include "bornlab/errors.hpp"
#include "bornlab/madelung.hpp"
#include "bornlab/observables.hpp"
#include "bornlab/probability.hpp"
#include "bornlab/propagator.hpp"

namespace bornlab::app {

std::string to_string(CheckMode m)
{
    switch (m) {
    case CheckMode::abs: return "abs";
    case CheckMode::rel: return "rel";
    case CheckMode::max: return "max";
    case CheckMode::min: return "min";
    }
    return "?";
}

std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::identity: return "identity";
    case Provenance::oracle: return "oracle";
    case Provenance::threshold: return "threshold";
    }
    return "?";
}

Check Check::make(std::string name, double value, double reference, double tolerance, CheckMode mode,
                  Provenance provenance)
{
    Check c{std::move(name), value, reference, tolerance, mode, provenance, false};
    const double diff = std::abs(value - reference);
    switch (mode) {
    case CheckMode::abs: c.pass = diff <= tolerance; break;
    case CheckMode::rel: c.pass = diff <= tolerance * std::max({1.0, std::abs(value), std::abs(reference)}); break;
    case CheckMode::max: c.pass = value <= reference + tolerance; break;
    case CheckMode::min: c.pass = value >= reference - tolerance; break;
    }
    // NaN never passes.
    if (!std::isfinite(value)) c.pass = false;
    return c;
}

std::vector<std::string> RunResult::failures() const
{
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (!c.pass) out.push_back(c.name);
    }
    return out;
}

namespace {

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

bool defined(const std::vector<std::uint8_t>& mask, std::size_t i) { return mask.empty() || mask[i]; }

// Collects checks, applying per-name tolerance overrides from the config.
class Checks {
public:
    explicit Checks(const RunConfig& cfg) : cfg_(cfg) {}

    void add(const std::string& name, double value, double reference, double tolerance, CheckMode mode,
             Provenance provenance)
    {
        if (auto it = cfg_.tolerances.find(name); it != cfg_.tolerances.end()) tolerance = it->second;
        list.push_back(Check::make(name, value, reference, tolerance, mode, provenance));
    }

    std::vector<Check> list;

private:
    const RunConfig& cfg_;
};

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path)
    {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
    }

    void header(const std::vector<std::string>& cols)
    {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << '\n';
    }

    void row(const std::vector<double>& values)
    {
        char buf[40];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.16e", values[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

struct Context {
    const RunConfig& cfg;
    std::filesystem::path dir;
    RunResult& result;
    Checks checks;
};

struct Setup {
    Model model;
    CatalogState state;
    Grid grid;
};

Setup build_setup(const RunConfig& cfg)
{
    Model model = build_model(*cfg.model);
    if (cfg.state->kind == "hydrogen" && model.potential.kind != PotentialKind::coulomb) {
        throw ConfigError("state: hydrogen states need the coulomb model");
    }
    CatalogState state = build_state(*cfg.state, model);
    Grid grid = build_grid(*cfg.grid);
    if (grid.dim() != model.dim()) {
        throw ConfigError("grid: has " + std::to_string(grid.dim()) + " axes but the model has "
                          + std::to_string(model.dim()) + " coordinates");
    }
    return {std::move(model), std::move(state), std::move(grid)};
}

// Closed-form time evolution is exact for eigen superpositions and for
// packets under the free model.
void require_closed_form_time(const Setup& s, double t, const char* what)
{
    if (t == 0.0) return;
    if (s.state.is_eigen_superposition()) return;
    if (s.model.potential.kind == PotentialKind::free) return;
    throw ConfigError(std::string(what) + ": closed-form evolution of this state needs the free model");
}

ComplexField state_at(const Setup& s, double t)
{
    require_closed_form_time(s, t, "time");
    return s.state.sample(s.grid, t);
}

void write_fields(Context& ctx, const ComplexField& psi, const Model& model)
{
    const Grid& g = psi.grid();
    const NodeMask nm = node_mask(psi);
    std::vector<RandomVariable> vel;
    for (std::size_t b = 0; b < model.bodies; ++b) vel.push_back(drift_velocity(psi, model, b));
    const RandomVariable energy = energy_rv(psi, model);

    std::vector<std::string> cols;
    for (std::size_t a = 0; a < g.dim(); ++a) cols.push_back("x" + std::to_string(a));
    cols.push_back("rho");
    for (std::size_t a = 0; a < g.dim(); ++a) cols.push_back("v" + std::to_string(a));
    cols.push_back("E");
    cols.push_back("mask");

    CsvWriter csv(ctx.dir / "fields.csv");
    csv.header(cols);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> row;
    for (std::size_t i = 0; i < g.size(); ++i) {
        row.clear();
        const auto x = g.point(i);
        for (std::size_t a = 0; a < g.dim(); ++a) row.push_back(x[a]);
        row.push_back(std::norm(psi[i]));
        const bool ok = nm.mask[i] != 0;
        for (const auto& v : vel) {
            for (const auto& comp : v.components) row.push_back(ok && defined(v.mask, i) ? comp[i] : nan);
        }
        row.push_back(ok && defined(energy.mask, i) ? energy.components[0][i] : nan);
        row.push_back(ok ? 1.0 : 0.0);
        csv.row(row);
    }
    ctx.result.artifacts.push_back("fields.csv");
}

// ------------------------------------------------------------------ commands

void cmd_list_states(Context& ctx)
{
    Json states = Json::array();
    auto add = [&](const CatalogState& s, const Json& spec) {
        Json e;
        e["label"] = s.label();
        e["family"] = s.family();
        e["dim"] = s.dim();
        e["state"] = spec;
        if (auto en = s.eigen_energy()) e["energy"] = *en;
        states.push_back(e);
    };
    for (int n = 1; n <= 3; ++n) {
        for (int l = 0; l < n; ++l) {
            for (int m = -l; m <= l; ++m) {
                add(hydrogen_state(n, l, m), {{"kind", "hydrogen"}, {"n", n}, {"l", l}, {"m", m}});
            }
        }
    }
    const Model ho = harmonic_model(1.0, 1, 1, {1.0});
    for (int n = 0; n <= 3; ++n) add(harmonic_eigenstate({n}, 1.0, ho), {{"kind", "harmonic"}, {"n", {n}}});
    const Model free1 = free_model(1, 1, {1.0});
    add(gaussian_packet({0.0}, 1.0, {0.0}, free1), {{"kind", "gaussian"}, {"center", {0.0}}, {"sigma", 1.0}});
    add(gaussian_packet({0.0}, 1.0, {2.0}, free1),
        {{"kind", "gaussian"}, {"center", {0.0}}, {"sigma", 1.0}, {"k0", {2.0}}});
    ctx.result.data["states"] = states;
    ctx.result.data["kinds"] = {"hydrogen", "harmonic", "gaussian", "superposition"};
}

void cmd_evolve(Context& ctx)
{
    const Setup s = build_setup(ctx.cfg);
    const auto& ev = ctx.cfg.evolution;
    EvolutionRecord rec;
    if (ev.method == "analytic") {
        if (!s.state.is_eigen_superposition()) throw ConfigError("evolution.method: analytic needs eigenstates");
        std::vector<double> times;
        for (std::size_t k = 0; k <= ev.steps; k += ev.stride) times.push_back(static_cast<double>(k) * ev.dt);
        if (ev.steps % ev.stride) times.push_back(static_cast<double>(ev.steps) * ev.dt);
        rec = analytic_record(s.state, s.grid, times);
    } else {
        const ComplexField psi0 = s.state.sample(s.grid, 0.0);
        rec = split_step(psi0, s.model, ev.dt, ev.steps, ev.stride);
    }

    std::vector<double> energies;
    for (const auto& st : rec.states) energies.push_back(qm_energy_expect(st, s.model));
    double norm_drift = 0.0;
    double energy_drift = 0.0;
    for (std::size_t k = 0; k < rec.norms.size(); ++k) {
        norm_drift = std::max(norm_drift, std::abs(rec.norms[k] - rec.norms.front()));
        energy_drift = std::max(energy_drift, rel_gap(energies[k], energies.front()));
    }
    ctx.checks.add("norm_drift", norm_drift, 0.0, 1e-10, CheckMode::max, Provenance::identity);
    ctx.checks.add("energy_drift", energy_drift, 0.0, 1e-6, CheckMode::max, Provenance::threshold);
    ctx.checks.add("norms", rec.norms.front(), 1.0, 1e-10, CheckMode::abs, Provenance::identity);

    ctx.result.data["method"] = ev.method;
    ctx.result.data["times"] = rec.times;
    ctx.result.data["norms"] = rec.norms;
    ctx.result.data["energies"] = energies;
    ctx.result.data["state"] = s.state.label();
    write_fields(ctx, rec.states.back(), s.model);
}

void cmd_expect(Context& ctx)
{
    const Setup s = build_setup(ctx.cfg);
    const ComplexField psi = state_at(s, ctx.cfg.time);
    const ProbabilityMeasure measure = born_measure(psi);
    const NodeMask nm = node_mask(psi);
    ctx.checks.add("masked_mass", nm.masked_mass, 0.0, kMaskedMassLimit, CheckMode::max, Provenance::threshold);

    Json& data = ctx.result.data;
    data["state"] = s.state.label();
    data["time"] = ctx.cfg.time;
    data["masked_cells"] = nm.masked_cells;

    double momentum_gap = 0.0;
    Json drift = Json::array();
    Json momentum = Json::array();
    for (std::size_t b = 0; b < s.model.bodies; ++b) {
        const auto v = expectation(drift_velocity(psi, s.model, b), measure);
        const auto p = qm_momentum_expect(psi, s.model, b);
        const double m = s.model.masses[b];
        for (std::size_t a = 0; a < v.size(); ++a) {
            momentum_gap = std::max(momentum_gap, rel_gap(m * v[a], p[a].real()));
            drift.push_back(v[a]);
            momentum.push_back(p[a].real());
        }
    }
    data["drift_mean"] = drift;
    data["qm_momentum"] = momentum;
    ctx.checks.add("momentum_identity", momentum_gap, 0.0, 1e-10, CheckMode::max, Provenance::identity);

    const RandomVariable energy = energy_rv(psi, s.model);
    const double e_mean = expectation(energy, measure)[0];
    const double e_qm = qm_energy_expect(psi, s.model);
    const double e_var = expectation(energy, measure, 2, true)[0];
    data["energy_mean"] = e_mean;
    data["energy_qm"] = e_qm;
    data["energy_variance"] = e_var;
    ctx.checks.add("energy_identity", e_mean, e_qm, 1e-10, CheckMode::rel, Provenance::identity);

    if (auto en = s.state.eigen_energy()) {
        data["eigen_energy"] = *en;
        // Var(E) in units of E_n^2.
        ctx.checks.add("energy_variance", e_var / std::max((*en) * (*en), 1e-300), 0.0, 1e-10, CheckMode::max,
                       Provenance::identity);
        ctx.checks.add("eigen_energy", e_mean, *en, 1e-6, CheckMode::rel, Provenance::identity);
        double field_gap = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (nm.mask[i] && defined(energy.mask, i)) field_gap = std::max(field_gap, rel_gap(energy.components[0][i], *en));
        }
        ctx.checks.add("energy_field", field_gap, 0.0, 1e-6, CheckMode::max, Provenance::identity);
    }

    if (s.state.family() == "hydrogen" && s.state.quantum_numbers()) {
        const double m = (*s.state.quantum_numbers())[2];
        const RandomVariable l = angular_momentum(psi, s.model, 0, {0.0, 0.0, 0.0});
        const double lz = expectation(l, measure)[2];
        double lz_field = 0.0;
        double drift_gap = 0.0;
        const RandomVariable v = drift_velocity(psi, s.model, 0);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (!nm.mask[i]) continue;
            if (defined(l.mask, i)) lz_field = std::max(lz_field, rel_gap(l.components[2][i], m));
            if (!defined(v.mask, i)) continue;
            const auto x = s.grid.point(i);
            const double r2 = x[0] * x[0] + x[1] * x[1];
            const double exact[3] = {-m * x[1] / r2, m * x[0] / r2, 0.0};
            for (std::size_t a = 0; a < 3; ++a) drift_gap = std::max(drift_gap, rel_gap(v.components[a][i], exact[a]));
        }
        data["lz_mean"] = lz;
        ctx.checks.add("lz_mean", lz, m, 1e-6, CheckMode::rel, Provenance::identity);
        ctx.checks.add("lz_field", lz_field, 0.0, 1e-6, CheckMode::max, Provenance::identity);
        ctx.checks.add("drift_closed_form", drift_gap, 0.0, 1e-6, CheckMode::max, Provenance::identity);
    }

    double decomposition = 0.0;
    for (std::size_t b = 0; b < s.model.bodies; ++b) {
        for (const auto& ax : uncertainty_report(psi, s.model, b)) {
            decomposition = std::max(decomposition, ax.decomposition_relative);
        }
    }
    ctx.checks.add("momentum_decomposition", decomposition, 0.0, 1e-6, CheckMode::max, Provenance::identity);
    write_fields(ctx, psi, s.model);
}

Json report_json(const ResidualReport& r)
{
    return {{"equation", to_string(r.equation)}, {"norm_l2", r.norm_l2},       {"norm_max", r.norm_max},
            {"h", r.h},                          {"dt", r.dt},                 {"masked_fraction", r.masked_fraction},
            {"reliable", r.reliable}};
}

void cmd_madelung(Context& ctx)
{
    const Setup s = build_setup(ctx.cfg);
    const auto& mc = ctx.cfg.madelung;
    require_closed_form_time(s, mc.t + mc.dt, "madelung.t");
    std::vector<ResidualReport> continuity;
    std::vector<ResidualReport> force;
    ComplexField mid;
    double tol = 1e-8;
    Provenance prov = Provenance::identity;
    if (mc.source == "exact") {
        mid = s.state.sample(s.grid, mc.t);
        continuity.push_back(continuity_residual_exact(mid, s.model));
        for (std::size_t b = 0; b < s.model.bodies; ++b) force.push_back(force_residual_exact(mid, s.model, b));
    } else {
        std::array<ComplexField, 3> snaps;
        if (mc.source == "analytic") {
            if (mc.t - mc.dt < 0.0) throw ConfigError("madelung.t: must be at least madelung.dt");
            for (int k = 0; k < 3; ++k) snaps[k] = s.state.sample(s.grid, mc.t + (k - 1) * mc.dt);
        } else {
            snaps = split_step_triple(s.state.sample(s.grid, 0.0), s.model, mc.dt, mc.t);
        }
        continuity.push_back(continuity_residual(snaps, mc.dt, s.model));
        for (std::size_t b = 0; b < s.model.bodies; ++b) force.push_back(force_residual(snaps, mc.dt, s.model, b));
        mid = snaps[1];
        tol = 1e-3;
        prov = Provenance::threshold;
    }
    const ResidualReport vort = vorticity_residual(mid, s.model);

    double force_norm = 0.0;
    Json reports = Json::array();
    reports.push_back(report_json(continuity[0]));
    for (const auto& f : force) {
        force_norm = std::max(force_norm, f.norm_l2);
        reports.push_back(report_json(f));
    }
    reports.push_back(report_json(vort));
    ctx.checks.add("continuity", continuity[0].norm_l2, 0.0, tol, CheckMode::max, prov);
    ctx.checks.add("force", force_norm, 0.0, tol, CheckMode::max, prov);
    ctx.checks.add("vorticity", vort.norm_max, 0.0, 1e-6, CheckMode::max, Provenance::identity);
    ctx.result.data["source"] = mc.source;
    ctx.result.data["t"] = mc.t;
    ctx.result.data["residuals"] = reports;
    ctx.result.data["state"] = s.state.label();
    write_fields(ctx, mid, s.model);
}

void cmd_double_slit(Context& ctx)
{
    const DoubleSlitConfig& c = ctx.cfg.double_slit;
    const DoubleSlitResult r = run_double_slit(c);
    ctx.checks.add("distance", r.distance, c.min_distance, 0.0, CheckMode::min, Provenance::oracle);
    ctx.checks.add("double_maxima", r.double_maxima, c.min_double_maxima, 0.0, CheckMode::min, Provenance::oracle);
    ctx.checks.add("mixture_maxima", r.mixture_maxima, c.max_mixture_maxima, 0.0, CheckMode::max, Provenance::oracle);
    ctx.checks.add("mirror", r.mirror_difference, 0.0, c.mirror_tolerance, CheckMode::max, Provenance::threshold);
    const std::pair<const char*, const DetectorHistogram*> runs[] = {
        {"both", &r.both}, {"left", &r.left}, {"right", &r.right}};
    Json& data = ctx.result.data;
    for (const auto& [name, h] : runs) {
        ctx.checks.add(std::string("mass_balance_") + name, h->mass_balance, 1.0, c.mass_tolerance, CheckMode::abs,
                       Provenance::threshold);
        data["runs"][name] = {{"transmitted_mass", h->transmitted_mass},
                              {"net_flux_mass", h->net_flux_mass},
                              {"clipped_fraction", h->clipped_fraction},
                              {"upstream_mass", h->upstream_mass},
                              {"mass_balance", h->mass_balance}};
    }
    data["collection"] = r.both.collection;
    data["axis"] = r.both.axis;
    data["distance"] = r.distance;
    data["double_maxima"] = r.double_maxima;
    data["mixture_maxima"] = r.mixture_maxima;
    data["mirror_difference"] = r.mirror_difference;
    data["histogram"] = {{"bin_edges", r.both.bin_edges},  {"both", r.both.mass_per_bin},
                         {"left", r.left.mass_per_bin},    {"right", r.right.mass_per_bin},
                         {"mixture", r.mixture}};

    CsvWriter csv(ctx.dir / "histogram.csv");
    csv.header({"y_lo", "y_hi", "both", "left", "right", "mixture"});
    for (std::size_t b = 0; b < r.mixture.size(); ++b) {
        csv.row({r.both.bin_edges[b], r.both.bin_edges[b + 1], r.both.mass_per_bin[b], r.left.mass_per_bin[b],
                 r.right.mass_per_bin[b], r.mixture[b]});
    }
    ctx.result.artifacts.push_back("histogram.csv");
}

void cmd_moments(Context& ctx)
{
    const Setup s = build_setup(ctx.cfg);
    require_closed_form_time(s, ctx.cfg.time, "time");
    const auto& mc = ctx.cfg.moments;
    const MomentTable table = moment_divergence_report(s.state, s.model, s.grid, mc.k_max, ctx.cfg.time);

    Json rows = Json::array();
    double position_gap = 0.0;
    double eigen_gap = 0.0;
    for (const auto& row : table.rows) {
        rows.push_back({{"observable", row.observable},
                        {"order", row.order},
                        {"kolmogorov", row.kolmogorov},
                        {"qm", row.qm},
                        {"abs_diff", row.abs_diff},
                        {"qm_source", row.qm_source}});
        if (row.observable.rfind("position", 0) == 0) position_gap = std::max(position_gap, row.abs_diff);
        if (row.observable == "energy") eigen_gap = std::max(eigen_gap, row.abs_diff);
    }
    ctx.result.data["moments"] = rows;
    ctx.result.data["state"] = s.state.label();
    ctx.result.data["time"] = ctx.cfg.time;

    ctx.checks.add("energy_k1", table.find("energy", 1).abs_diff, 0.0, 1e-10, CheckMode::max, Provenance::identity);
    ctx.checks.add("position", position_gap, 0.0, 1e-9, CheckMode::max, Provenance::identity);
    if (s.state.eigen_energy()) {
        ctx.checks.add("eigen_energy_moments", eigen_gap, 0.0, 1e-8, CheckMode::max, Provenance::identity);
    }
    if (mc.expected_gap) {
        const auto& g = *mc.expected_gap;
        ctx.checks.add("expected_gap", table.find("energy", g.order).abs_diff, g.value, g.tolerance, CheckMode::abs,
                       Provenance::oracle);
    }

    CsvWriter csv(ctx.dir / "moments.csv");
    csv.header({"row", "order", "kolmogorov", "qm", "abs_diff"});
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        csv.row({static_cast<double>(i), static_cast<double>(row.order), row.kolmogorov, row.qm, row.abs_diff});
    }
    ctx.result.artifacts.push_back("moments.csv");
    write_fields(ctx, state_at(s, ctx.cfg.time), s.model);
}

void cmd_uncertainty(Context& ctx)
{
    const Setup s = build_setup(ctx.cfg);
    const ComplexField psi = state_at(s, ctx.cfg.time);
    double decomposition = 0.0;
    double heisenberg = std::numeric_limits<double>::infinity();
    Json axes = Json::array();
    for (std::size_t b = 0; b < s.model.bodies; ++b) {
        for (const auto& ax : uncertainty_report(psi, s.model, b)) {
            decomposition = std::max(decomposition, ax.decomposition_relative);
            heisenberg = std::min(heisenberg, ax.qm_product);
            axes.push_back({{"body", b},
                            {"axis", ax.axis},
                            {"sigma_x", ax.sigma_x},
                            {"sigma_p_qm", ax.sigma_p_qm},
                            {"m_sigma_v", ax.m_sigma_v},
                            {"m_sigma_u", ax.m_sigma_u},
                            {"qm_product", ax.qm_product},
                            {"drift_product", ax.drift_product},
                            {"decomposition_residual", ax.decomposition_residual},
                            {"decomposition_relative", ax.decomposition_relative}});
        }
    }
    ctx.result.data["axes"] = axes;
    ctx.result.data["state"] = s.state.label();
    ctx.checks.add("decomposition", decomposition, 0.0, 1e-6, CheckMode::max, Provenance::identity);
    ctx.checks.add("heisenberg", heisenberg, 0.5 * s.model.hbar, 1e-9, CheckMode::min, Provenance::identity);
    write_fields(ctx, psi, s.model);
}

void cmd_sample(Context& ctx)
{
    const Setup s = build_setup(ctx.cfg);
    const ComplexField psi = state_at(s, ctx.cfg.time);
    const ProbabilityMeasure measure = born_measure(psi);
    const std::uint64_t seed = *ctx.cfg.seed;
    const std::size_t n = ctx.cfg.sample.n;

    const SampleSet a = sample(measure, n, seed);
    const SampleSet again = sample(measure, n, seed);
    const bool same = a.coords.size() == again.coords.size()
                      && std::memcmp(a.coords.data(), again.coords.data(), a.coords.size() * sizeof(double)) == 0;
    ctx.checks.add("reproducible", same ? 1.0 : 0.0, 1.0, 0.0, CheckMode::abs, Provenance::identity);

    const ChiSquareResult chi = chi_square_test(measure, a, ctx.cfg.sample.bins);
    ctx.checks.add("chi_square", chi.p_value, 1e-3, 0.0, CheckMode::min, Provenance::threshold);

    // Monte Carlo E[v] from the drift at each sample's cell.
    std::vector<std::size_t> cells(n);
    for (std::size_t i = 0; i < n; ++i) cells[i] = s.grid.locate(a.point(i));
    double worst = 0.0;
    Json mc = Json::array();
    for (std::size_t b = 0; b < s.model.bodies; ++b) {
        const RandomVariable v = drift_velocity(psi, s.model, b);
        const auto quad = expectation(v, measure);
        for (std::size_t c = 0; c < v.arity(); ++c) {
            double sum = 0.0, sum2 = 0.0;
            std::size_t used = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (cells[i] == Grid::npos || !defined(v.mask, cells[i])) continue;
                const double x = v.components[c][cells[i]];
                sum += x;
                sum2 += x * x;
                ++used;
            }
            const double mean = sum / static_cast<double>(used);
            const double var = std::max(0.0, sum2 / static_cast<double>(used) - mean * mean);
            const double se = std::sqrt(var / static_cast<double>(used));
            const double gap = std::abs(mean - quad[c]);
            const double score = gap == 0.0 ? 0.0 : (se > 0.0 ? gap / se : std::numeric_limits<double>::infinity());
            worst = std::max(worst, score);
            mc.push_back({{"body", b}, {"component", c}, {"monte_carlo", mean}, {"quadrature", quad[c]},
                          {"standard_error", se}, {"samples", used}, {"score", score}});
        }
    }
    ctx.checks.add("drift_mean", worst, 0.0, 4.0, CheckMode::max, Provenance::threshold);

    Json& data = ctx.result.data;
    data["state"] = s.state.label();
    data["seed"] = seed;
    data["n"] = n;
    data["chi_square"] = {{"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}, {"bins", chi.bins}};
    data["drift_mean"] = mc;
    double first[kMaxDim] = {};
    for (std::size_t k = 0; k < a.dim && n > 0; ++k) first[k] = a.point(0)[k];
    data["first_sample"] = std::vector<double>(first, first + a.dim);

    // Marginal along axis 0: expected cell mass vs observed frequency.
    const std::size_t keep[] = {0};
    const ProbabilityMeasure marg = marginal(measure, keep);
    std::vector<double> counts(marg.grid().size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a.point(i)[0];
        const std::size_t cell = marg.grid().locate(std::span<const double>(&x, 1));
        if (cell != Grid::npos) counts[cell] += 1.0;
    }
    CsvWriter csv(ctx.dir / "histogram.csv");
    csv.header({"x_lo", "x_hi", "expected", "observed"});
    const Grid& mg = marg.grid();
    for (std::size_t i = 0; i < mg.size(); ++i) {
        const double lo = mg.extent(0).lo + static_cast<double>(i) * mg.spacing(0);
        csv.row({lo, lo + mg.spacing(0), marg.cell_mass()[i], counts[i] / static_cast<double>(n)});
    }
    ctx.result.artifacts.push_back("histogram.csv");
    write_fields(ctx, psi, s.model);
}

void write_summary(const RunConfig& cfg, RunResult& result)
{
    result.artifacts.push_back("summary.json");
    std::sort(result.artifacts.begin(), result.artifacts.end());
    std::ofstream out(result.directory / "summary.json");
    if (!out) throw std::runtime_error("cannot write " + (result.directory / "summary.json").string());
    out << summary_json(cfg, result).dump(2) << '\n';
}

} // namespace

Json summary_json(const RunConfig& config, const RunResult& result)
{
    Json checks = Json::array();
    for (const auto& c : result.checks) {
        checks.push_back({{"name", c.name},
                          {"value", c.value},
                          {"reference", c.reference},
                          {"tolerance", c.tolerance},
                          {"mode", to_string(c.mode)},
                          {"provenance", to_string(c.provenance)},
                          {"pass", c.pass}});
    }
    Json doc;
    doc["name"] = config.name;
    doc["command"] = to_string(config.command);
    doc["config"] = config.resolved;
    doc["seed"] = config.seed ? Json(*config.seed) : Json(nullptr);
    doc["checks"] = checks;
    doc["failures"] = result.failures();
    doc["data"] = result.data.is_null() ? Json::object() : result.data;
    doc["artifacts"] = result.artifacts;
    doc["exit_code"] = static_cast<int>(result.exit);
    doc["status"] = result.exit == ExitCode::pass              ? "pass"
                    : result.exit == ExitCode::numerical_abort ? "numerical_abort"
                                                               : "fail";
    if (!result.error.empty()) doc["error"] = result.error;
    return doc;
}

RunResult run(const RunConfig& config, const std::filesystem::path& out_root)
{
    RunResult result;
    result.directory = out_root / config.name;
    std::filesystem::create_directories(result.directory);
    Context ctx{config, result.directory, result, Checks(config)};
    try {
        switch (config.command) {
        case Command::list_states: cmd_list_states(ctx); break;
        case Command::evolve: cmd_evolve(ctx); break;
        case Command::expect: cmd_expect(ctx); break;
        case Command::madelung_check: cmd_madelung(ctx); break;
        case Command::double_slit: cmd_double_slit(ctx); break;
        case Command::moments: cmd_moments(ctx); break;
        case Command::uncertainty: cmd_uncertainty(ctx); break;
        case Command::sample: cmd_sample(ctx); break;
        }
        result.checks = std::move(ctx.checks.list);
        result.exit = result.failures().empty() ? ExitCode::pass : ExitCode::check_failure;
    } catch (const NumericalAbort& e) {
        result.checks = std::move(ctx.checks.list);
        result.exit = ExitCode::numerical_abort;
        result.error = e.what();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::exception& e) {
        result.checks = std::move(ctx.checks.list);
        result.exit = ExitCode::check_failure;
        result.error = e.what();
    }
    write_summary(config, result);
    return result;
}

int cli_main(int argc, char** argv)
{
    CLI::App cli{"bornlab: Born-measure observables, Madelung residuals and double-slit runs"};
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    cli.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    cli.add_option("--out", out_dir, "output root; results go to <out>/<name>")->capture_default_str();
    cli.add_option("--seed", seed, "RNG seed (overrides the config)");
    cli.add_option("--override", overrides, "key.path=value, value parsed as JSON (repeatable)");
    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return static_cast<int>(ExitCode::usage);
    }

    try {
        Json doc = config_path.empty() ? Json::object() : load_json(config_path);
        for (const auto& o : overrides) apply_override(doc, o);
        if (seed) doc["seed"] = *seed;
        const RunConfig cfg = parse_config(doc);
        const RunResult result = run(cfg, out_dir);
        for (const auto& c : result.checks) {
            std::printf("%-4s %-24s value=%.6e reference=%.6e tol=%.1e (%s, %s)\n", c.pass ? "PASS" : "FAIL",
                        c.name.c_str(), c.value, c.reference, c.tolerance, to_string(c.mode).c_str(),
                        to_string(c.provenance).c_str());
        }
        if (!result.error.empty()) std::fprintf(stderr, "error: %s\n", result.error.c_str());
        std::printf("summary: %s\n", (result.directory / "summary.json").string().c_str());
        return static_cast<int>(result.exit);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return static_cast<int>(ExitCode::usage);
    }
}

} // namespace bornlab::app
