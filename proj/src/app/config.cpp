#include "bornlab/app/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace bornlab::app {

std::string to_string(Command c)
{
    switch (c) {
    case Command::list_states: return "list-states";
    case Command::evolve: return "evolve";
    case Command::expect: return "expect";
    case Command::madelung_check: return "madelung-check";
    case Command::double_slit: return "double-slit";
    case Command::moments: return "moments";
    case Command::uncertainty: return "uncertainty";
    case Command::sample: return "sample";
    }
    return "?";
}

Command command_from_string(const std::string& s)
{
    for (auto c : {Command::list_states, Command::evolve, Command::expect, Command::madelung_check, Command::double_slit,
                   Command::moments, Command::uncertainty, Command::sample}) {
        if (to_string(c) == s) return c;
    }
    throw ConfigError("command: unknown command '" + s + "'");
}

namespace {

// Object reader that remembers which keys were consumed so leftovers can be
// reported as unknown.
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const Json& raw(const std::string& key)
    {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(sub(key) + ": required key missing");
        return j_.at(key);
    }

    template <typename T>
    T require(const std::string& key)
    {
        return convert<T>(raw(key), sub(key));
    }

    template <typename T>
    T get(const std::string& key, T fallback)
    {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        return convert<T>(j_.at(key), sub(key));
    }

    std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(sub(key) + ": unknown key");
        }
    }

    template <typename T>
    static T convert(const Json& v, const std::string& path)
    {
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError(path + ": expected a number");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
                if (std::is_unsigned_v<T> && v.get<long long>() < 0 && !v.is_number_unsigned()) {
                    throw ConfigError(path + ": expected a non-negative integer");
                }
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError(path + ": expected a string");
            }
            return v.get<T>();
        } catch (const Json::exception& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename T>
std::vector<T> list_of(const Json& v, const std::string& path)
{
    if (!v.is_array()) throw ConfigError(path + ": expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Reader::convert<T>(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Interval interval_of(const Json& v, const std::string& path)
{
    const auto p = list_of<double>(v, path);
    if (p.size() != 2) throw ConfigError(path + ": expected [lo, hi]");
    return {p[0], p[1]};
}

Complex complex_of(const Json& v, const std::string& path)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    const auto p = list_of<double>(v, path);
    if (p.size() != 2) throw ConfigError(path + ": expected a number or [re, im]");
    return {p[0], p[1]};
}

ModelSpec parse_model(const Json& j, const std::string& path)
{
    Reader r(j, path);
    ModelSpec m;
    m.potential = r.get<std::string>("potential", m.potential);
    if (m.potential != "free" && m.potential != "harmonic" && m.potential != "coulomb") {
        throw ConfigError(r.sub("potential") + ": expected free, harmonic or coulomb");
    }
    m.bodies = r.get<std::size_t>("bodies", m.bodies);
    m.dims_per_body = r.get<std::size_t>("dims_per_body", m.potential == "coulomb" ? 3 : m.dims_per_body);
    if (r.has("masses")) m.masses = list_of<double>(r.raw("masses"), r.sub("masses"));
    else m.masses.assign(m.bodies, 1.0);
    m.hbar = r.get<double>("hbar", m.hbar);
    m.omega = r.get<double>("omega", m.omega);
    r.finish();
    if (m.masses.size() != m.bodies) throw ConfigError(r.sub("masses") + ": need one mass per body");
    return m;
}

StateSpec parse_state(const Json& j, const std::string& path)
{
    Reader r(j, path);
    StateSpec s;
    s.kind = r.require<std::string>("kind");
    if (s.kind == "hydrogen") {
        s.n = r.require<int>("n");
        s.l = r.get<int>("l", 0);
        s.m = r.get<int>("m", 0);
    } else if (s.kind == "harmonic") {
        s.quanta = list_of<int>(r.raw("n"), r.sub("n"));
    } else if (s.kind == "gaussian") {
        s.center = list_of<double>(r.raw("center"), r.sub("center"));
        s.sigma = r.require<double>("sigma");
        s.k0 = r.has("k0") ? list_of<double>(r.raw("k0"), r.sub("k0")) : std::vector<double>(s.center.size(), 0.0);
    } else if (s.kind == "superposition") {
        const Json& comps = r.raw("components");
        if (!comps.is_array() || comps.empty()) throw ConfigError(r.sub("components") + ": expected a non-empty array");
        for (std::size_t i = 0; i < comps.size(); ++i) {
            s.components.push_back(parse_state(comps[i], r.sub("components") + "[" + std::to_string(i) + "]"));
        }
        const Json& coeffs = r.raw("coefficients");
        if (!coeffs.is_array() || coeffs.size() != comps.size()) {
            throw ConfigError(r.sub("coefficients") + ": expected one coefficient per component");
        }
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            s.coefficients.push_back(complex_of(coeffs[i], r.sub("coefficients") + "[" + std::to_string(i) + "]"));
        }
    } else {
        throw ConfigError(r.sub("kind") + ": expected hydrogen, harmonic, gaussian or superposition");
    }
    r.finish();
    return s;
}

GridSpec parse_grid(const Json& j, const std::string& path)
{
    Reader r(j, path);
    GridSpec g;
    const Json& ext = r.raw("extents");
    if (!ext.is_array()) throw ConfigError(r.sub("extents") + ": expected an array of [lo, hi]");
    for (std::size_t i = 0; i < ext.size(); ++i) {
        g.extents.push_back(interval_of(ext[i], r.sub("extents") + "[" + std::to_string(i) + "]"));
    }
    g.points = list_of<std::size_t>(r.raw("points"), r.sub("points"));
    r.finish();
    if (g.points.size() != g.extents.size()) throw ConfigError(r.sub("points") + ": need one entry per extent");
    return g;
}

DoubleSlitConfig parse_double_slit(const Json& j, const std::string& path)
{
    Reader r(j, path);
    DoubleSlitConfig c;
    if (r.has("x_range")) c.x_range = interval_of(r.raw("x_range"), r.sub("x_range"));
    if (r.has("y_range")) c.y_range = interval_of(r.raw("y_range"), r.sub("y_range"));
    c.nx = r.get("nx", c.nx);
    c.ny = r.get("ny", c.ny);
    c.x0 = r.get("x0", c.x0);
    c.y0 = r.get("y0", c.y0);
    c.sigma = r.get("sigma", c.sigma);
    c.k0 = r.get("k0", c.k0);
    c.mass = r.get("mass", c.mass);
    c.hbar = r.get("hbar", c.hbar);
    c.barrier_x = r.get("barrier_x", c.barrier_x);
    c.thickness = r.get("thickness", c.thickness);
    c.slit_separation = r.get("slit_separation", c.slit_separation);
    c.slit_width = r.get("slit_width", c.slit_width);
    c.barrier_height = r.get("barrier_height", c.barrier_height);
    c.detector_x = r.get("detector_x", c.detector_x);
    c.dt = r.get("dt", c.dt);
    c.steps = r.get("steps", c.steps);
    c.flux_stride = r.get("flux_stride", c.flux_stride);
    c.bins = r.get("bins", c.bins);
    c.fringe_fraction = r.get("fringe_fraction", c.fringe_fraction);
    c.min_distance = r.get("min_distance", c.min_distance);
    c.min_double_maxima = r.get("min_double_maxima", c.min_double_maxima);
    c.max_mixture_maxima = r.get("max_mixture_maxima", c.max_mixture_maxima);
    c.mirror_tolerance = r.get("mirror_tolerance", c.mirror_tolerance);
    c.mass_tolerance = r.get("mass_tolerance", c.mass_tolerance);
    r.finish();
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return c;
}

// Overwrites leaf `key` in nested objects, creating them as needed.
Json& descend(Json& doc, const std::vector<std::string>& parts, const std::string& full)
{
    Json* cur = &doc;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        if (p.empty()) throw ConfigError("--override " + full + ": empty key segment");
        if (cur->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(p);
            } catch (const std::exception&) {
                throw ConfigError("--override " + full + ": '" + p + "' is not an array index");
            }
            if (idx >= cur->size()) throw ConfigError("--override " + full + ": index " + p + " out of range");
            cur = &(*cur)[idx];
        } else {
            if (cur->is_null()) *cur = Json::object();
            if (!cur->is_object()) throw ConfigError("--override " + full + ": '" + p + "' is inside a non-object value");
            cur = &(*cur)[p];
        }
    }
    return *cur;
}

} // namespace

Json load_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config: malformed JSON in '" + path.string() + "': " + e.what());
    }
}

void apply_override(Json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--override " + assignment + ": expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }
    if (!doc.is_object()) doc = Json::object();
    descend(doc, parts, key) = std::move(value);
}

std::vector<std::string> check_names(Command c)
{
    switch (c) {
    case Command::list_states: return {};
    case Command::evolve: return {"norm_drift", "energy_drift", "norms"};
    case Command::expect:
        return {"momentum_identity", "energy_identity", "masked_mass", "energy_variance", "eigen_energy",
                "lz_mean", "lz_field", "energy_field", "drift_closed_form", "momentum_decomposition"};
    case Command::madelung_check: return {"continuity", "force", "vorticity"};
    case Command::double_slit:
        return {"distance", "double_maxima", "mixture_maxima", "mirror", "mass_balance_both", "mass_balance_left",
                "mass_balance_right"};
    case Command::moments: return {"energy_k1", "position", "eigen_energy_moments", "expected_gap"};
    case Command::uncertainty: return {"decomposition", "heisenberg"};
    case Command::sample: return {"reproducible", "chi_square", "drift_mean"};
    }
    return {};
}

RunConfig parse_config(const Json& doc)
{
    Reader r(doc, "");
    RunConfig c;
    c.command = command_from_string(r.require<std::string>("command"));
    c.name = r.get<std::string>("name", to_string(c.command));
    if (c.name.empty() || c.name.find('/') != std::string::npos || c.name == "." || c.name == "..") {
        throw ConfigError("name: must be a plain, non-empty directory name");
    }
    if (r.has("seed")) c.seed = r.require<std::uint64_t>("seed");
    if (r.has("model")) c.model = parse_model(r.raw("model"), "model");
    if (r.has("state")) c.state = parse_state(r.raw("state"), "state");
    if (r.has("grid")) c.grid = parse_grid(r.raw("grid"), "grid");
    c.time = r.get("time", c.time);
    if (r.has("evolution")) {
        Reader e(r.raw("evolution"), "evolution");
        c.evolution.method = e.get("method", c.evolution.method);
        if (c.evolution.method != "split_step" && c.evolution.method != "analytic") {
            throw ConfigError("evolution.method: expected split_step or analytic");
        }
        c.evolution.dt = e.get("dt", c.evolution.dt);
        c.evolution.steps = e.get("steps", c.evolution.steps);
        c.evolution.stride = e.get("stride", c.evolution.stride);
        e.finish();
        if (!(c.evolution.dt > 0.0)) throw ConfigError("evolution.dt: must be positive");
        if (c.evolution.stride == 0) throw ConfigError("evolution.stride: must be positive");
    }
    if (r.has("madelung")) {
        Reader m(r.raw("madelung"), "madelung");
        c.madelung.source = m.get("source", c.madelung.source);
        if (c.madelung.source != "exact" && c.madelung.source != "analytic" && c.madelung.source != "split_step") {
            throw ConfigError("madelung.source: expected exact, analytic or split_step");
        }
        c.madelung.t = m.get("t", c.madelung.t);
        c.madelung.dt = m.get("dt", c.madelung.dt);
        m.finish();
        if (!(c.madelung.dt > 0.0)) throw ConfigError("madelung.dt: must be positive");
    }
    if (r.has("moments")) {
        Reader m(r.raw("moments"), "moments");
        c.moments.k_max = m.get("k_max", c.moments.k_max);
        if (c.moments.k_max < 1) throw ConfigError("moments.k_max: must be >= 1");
        if (m.has("expected_gap")) {
            Reader g(m.raw("expected_gap"), "moments.expected_gap");
            GapSpec gap;
            gap.order = g.get("order", gap.order);
            gap.value = g.require<double>("value");
            gap.tolerance = g.get("tolerance", gap.tolerance);
            g.finish();
            if (gap.order < 1 || gap.order > c.moments.k_max) {
                throw ConfigError("moments.expected_gap.order: must lie in [1, k_max]");
            }
            c.moments.expected_gap = gap;
        }
        m.finish();
    }
    if (r.has("sample")) {
        Reader s(r.raw("sample"), "sample");
        c.sample.n = s.get("n", c.sample.n);
        c.sample.bins = s.get("bins", c.sample.bins);
        s.finish();
        if (c.sample.n == 0) throw ConfigError("sample.n: must be positive");
        if (c.sample.bins < 2) throw ConfigError("sample.bins: must be at least 2");
    }
    if (r.has("double_slit")) c.double_slit = parse_double_slit(r.raw("double_slit"), "double_slit");
    if (r.has("tolerances")) {
        Reader t(r.raw("tolerances"), "tolerances");
        const auto names = check_names(c.command);
        for (const auto& name : names) {
            if (t.has(name)) c.tolerances[name] = t.require<double>(name);
        }
        t.finish();
    }
    r.finish();

    const bool needs_state = c.command != Command::list_states && c.command != Command::double_slit;
    if (needs_state) {
        if (!c.model) throw ConfigError("model: required for command " + to_string(c.command));
        if (!c.state) throw ConfigError("state: required for command " + to_string(c.command));
        if (!c.grid) throw ConfigError("grid: required for command " + to_string(c.command));
    }
    if (c.command == Command::sample && !c.seed) throw ConfigError("seed: required for command sample");
    c.resolved = doc;
    return c;
}

Model build_model(const ModelSpec& s)
{
    if (s.potential == "coulomb") {
        if (s.bodies != 1 || s.dims_per_body != 3 || s.masses != std::vector<double>{1.0} || s.hbar != 1.0) {
            throw ConfigError("model: the coulomb model is one body in 3D with mu = hbar = 1");
        }
        return coulomb_model();
    }
    try {
        if (s.potential == "harmonic") return harmonic_model(s.omega, s.bodies, s.dims_per_body, s.masses, s.hbar);
        return free_model(s.bodies, s.dims_per_body, s.masses, s.hbar);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

namespace {

CatalogState build_state_at(const StateSpec& s, const Model& model, const std::string& path)
{
    try {
        if (s.kind == "hydrogen") return hydrogen_state(s.n, s.l, s.m);
        if (s.kind == "harmonic") {
            if (model.potential.kind != PotentialKind::harmonic) {
                throw ConfigError(path + ": harmonic states need the harmonic model");
            }
            return harmonic_eigenstate(s.quanta, model.potential.omega, model);
        }
        if (s.kind == "gaussian") return gaussian_packet(s.center, s.sigma, s.k0, model);
        std::vector<CatalogState> parts;
        for (std::size_t i = 0; i < s.components.size(); ++i) {
            parts.push_back(build_state_at(s.components[i], model, path + ".components[" + std::to_string(i) + "]"));
        }
        return superpose(s.coefficients, parts);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace

CatalogState build_state(const StateSpec& spec, const Model& model)
{
    CatalogState s = build_state_at(spec, model, "state");
    if (s.dim() != model.dim()) {
        throw ConfigError("state: has " + std::to_string(s.dim()) + " coordinates but the model has "
                          + std::to_string(model.dim()));
    }
    return s;
}

Grid build_grid(const GridSpec& spec)
{
    try {
        return Grid::make(spec.extents, spec.points);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

} // namespace bornlab::app
