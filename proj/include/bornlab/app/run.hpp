#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bornlab/app/config.hpp"

namespace bornlab::app {

enum class CheckMode { abs, rel, max, min };
enum class Provenance { identity, oracle, threshold };

std::string to_string(CheckMode m);
std::string to_string(Provenance p);

/// One numeric verdict in the summary.
///   abs: |value - reference| <= tolerance
///   rel: |value - reference| <= tolerance * max(1, |value|, |reference|)
///   max: value <= reference + tolerance
///   min: value >= reference - tolerance
struct Check {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    CheckMode mode = CheckMode::abs;
    Provenance provenance = Provenance::identity;
    bool pass = false;

    static Check make(std::string name, double value, double reference, double tolerance, CheckMode mode,
                      Provenance provenance);
};

enum class ExitCode : int { pass = 0, check_failure = 1, usage = 2, numerical_abort = 3 };

struct RunResult {
    ExitCode exit = ExitCode::pass;
    std::vector<Check> checks;
    Json data;
    std::string error;                    // abort or failure message, empty otherwise
    std::filesystem::path directory;      // out/<name>
    std::vector<std::string> artifacts;   // file names written into directory

    bool passed() const { return exit == ExitCode::pass; }
    std::vector<std::string> failures() const;
};

/// Executes the command and writes summary.json plus the CSV files into
/// out_root/<name>. ConfigError propagates; NumericalAbort is turned into
/// exit 3 with a summary.
RunResult run(const RunConfig& config, const std::filesystem::path& out_root);

/// Summary document exactly as written to summary.json (sorted keys).
Json summary_json(const RunConfig& config, const RunResult& result);

/// Full command-line entry point: --config, --out, --seed, --override.
int cli_main(int argc, char** argv);

} // namespace bornlab::app
