#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bornlab/catalog.hpp"
#include "bornlab/experiments.hpp"
#include "bornlab/grid.hpp"
#include "bornlab/model.hpp"

namespace bornlab::app {

using Json = nlohmann::json;

/// Schema or usage problem; the message starts with the offending key path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Command { list_states, evolve, expect, madelung_check, double_slit, moments, uncertainty, sample };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

struct ModelSpec {
    std::string potential = "free";  // free | harmonic | coulomb
    std::size_t bodies = 1;
    std::size_t dims_per_body = 1;
    std::vector<double> masses{1.0};
    double hbar = 1.0;
    double omega = 1.0;
};

struct StateSpec {
    std::string kind;  // hydrogen | harmonic | gaussian | superposition
    int n = 1, l = 0, m = 0;
    std::vector<int> quanta;
    std::vector<double> center;
    std::vector<double> k0;
    double sigma = 1.0;
    std::vector<Complex> coefficients;
    std::vector<StateSpec> components;
};

struct GridSpec {
    std::vector<Interval> extents;
    std::vector<std::size_t> points;
};

struct EvolutionSpec {
    std::string method = "split_step";  // split_step | analytic
    double dt = 0.01;
    std::size_t steps = 100;
    std::size_t stride = 10;
};

struct MadelungSpec {
    std::string source = "exact";  // exact | analytic | split_step
    double t = 0.5;
    double dt = 0.01;
};

struct GapSpec {
    int order = 2;
    double value = 0.0;
    double tolerance = 1e-6;
};

struct MomentsSpec {
    int k_max = 4;
    std::optional<GapSpec> expected_gap;
};

struct SampleSpec {
    std::size_t n = 100000;
    std::size_t bins = 64;
};

struct RunConfig {
    std::string name;
    Command command = Command::expect;
    std::optional<std::uint64_t> seed;
    std::optional<ModelSpec> model;
    std::optional<StateSpec> state;
    std::optional<GridSpec> grid;
    double time = 0.0;
    EvolutionSpec evolution;
    MadelungSpec madelung;
    MomentsSpec moments;
    SampleSpec sample;
    DoubleSlitConfig double_slit;
    std::map<std::string, double> tolerances;  // check name -> tolerance override
    Json resolved;                             // the validated document, echoed into the summary
};

/// Reads a JSON file; throws ConfigError when it is missing or malformed.
Json load_json(const std::filesystem::path& path);

/// Applies "a.b.c=value" to the document. The value is parsed as JSON and
/// taken as a plain string when that fails.
void apply_override(Json& doc, const std::string& assignment);

/// Validates the document (unknown keys rejected) into a RunConfig.
RunConfig parse_config(const Json& doc);

/// Names of the checks a command can emit; `tolerances` keys must be among them.
std::vector<std::string> check_names(Command c);

Model build_model(const ModelSpec& spec);
CatalogState build_state(const StateSpec& spec, const Model& model);
Grid build_grid(const GridSpec& spec);

} // namespace bornlab::app
