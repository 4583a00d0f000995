#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bornlab/app/config.hpp"
#include "bornlab/app/run.hpp"

using namespace bornlab;
using namespace bornlab::app;

namespace {

Json hydrogen_expect()
{
    return Json::parse(R"({
        "command": "expect",
        "model": {"potential": "coulomb"},
        "state": {"kind": "hydrogen", "n": 2, "l": 1, "m": 1},
        "grid": {"extents": [[-20, 20], [-20, 20], [-20, 20]], "points": [8, 8, 8]}
    })");
}

Json gaussian_evolve()
{
    return Json::parse(R"({
        "name": "ge",
        "command": "evolve",
        "model": {"potential": "free", "bodies": 1, "dims_per_body": 1, "masses": [1.0]},
        "state": {"kind": "gaussian", "center": [0.0], "sigma": 1.0, "k0": [1.0]},
        "grid": {"extents": [[-20, 20]], "points": [256]},
        "evolution": {"dt": 0.01, "steps": 50, "stride": 10}
    })");
}

std::string error_of(const Json& doc)
{
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("bornlab_test_config_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("minimal hydrogen expect config")
{
    const RunConfig c = parse_config(hydrogen_expect());
    CHECK(c.command == Command::expect);
    CHECK(c.name == "expect");
    REQUIRE(c.model);
    CHECK(c.model->potential == "coulomb");
    CHECK(c.model->dims_per_body == 3);
    REQUIRE(c.state);
    CHECK(c.state->m == 1);
    CHECK(c.grid->points == std::vector<std::size_t>{8, 8, 8});
    CHECK(!c.seed);
}

TEST_CASE("unknown keys are named with their path")
{
    Json doc = hydrogen_expect();
    doc["model"]["potental"] = "free";
    CHECK(error_of(doc).find("model.potental") != std::string::npos);

    Json top = hydrogen_expect();
    top["gird"] = 1;
    CHECK(error_of(top).find("gird") != std::string::npos);

    Json nested = Json::parse(R"({"command": "moments", "moments": {"expected_gap": {"value": 1, "tol": 2}}})");
    CHECK(error_of(nested).find("moments.expected_gap.tol") != std::string::npos);

    Json tol = hydrogen_expect();
    tol["tolerances"] = {{"chi_square", 1.0}};
    CHECK(error_of(tol).find("tolerances.chi_square") != std::string::npos);
}

TEST_CASE("schema violations")
{
    Json doc = hydrogen_expect();
    doc["grid"]["points"] = {8, 8};
    CHECK(error_of(doc).find("grid.points") != std::string::npos);

    doc = hydrogen_expect();
    doc["state"]["n"] = "two";
    CHECK(error_of(doc).find("state.n") != std::string::npos);

    doc = hydrogen_expect();
    doc["command"] = "explode";
    CHECK(error_of(doc).find("command") != std::string::npos);

    doc = hydrogen_expect();
    doc.erase("state");
    CHECK(error_of(doc).find("state") != std::string::npos);

    doc = hydrogen_expect();
    doc["command"] = "sample";
    CHECK(error_of(doc).find("seed") != std::string::npos);
    doc["seed"] = 7;
    CHECK(error_of(doc).empty());

    doc = hydrogen_expect();
    doc["name"] = "../escape";
    CHECK(error_of(doc).find("name") != std::string::npos);

    doc = Json::parse(R"({"command": "double-slit", "double_slit": {"bins": 7}})");
    CHECK(error_of(doc).find("double_slit") != std::string::npos);
}

TEST_CASE("overrides win over file values")
{
    Json doc = gaussian_evolve();
    apply_override(doc, "evolution.dt=0.002");
    CHECK(parse_config(doc).evolution.dt == 0.002);

    apply_override(doc, "name=renamed");
    CHECK(parse_config(doc).name == "renamed");

    apply_override(doc, "grid.points.0=128");
    CHECK(parse_config(doc).grid->points[0] == 128);

    apply_override(doc, "state.k0=[2.5]");
    CHECK(parse_config(doc).state->k0 == std::vector<double>{2.5});

    Json empty = Json::object();
    apply_override(empty, "command=list-states");
    CHECK(parse_config(empty).command == Command::list_states);

    CHECK_THROWS_AS(apply_override(doc, "no-equals"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "grid.points.9=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "a..b=1"), ConfigError);
}

TEST_CASE("superposition coefficients accept complex pairs")
{
    Json doc = Json::parse(R"({
        "command": "expect",
        "model": {"potential": "harmonic", "omega": 1.0},
        "state": {"kind": "superposition",
                  "components": [{"kind": "harmonic", "n": [0]}, {"kind": "harmonic", "n": [1]}],
                  "coefficients": [1.0, [0.0, 1.0]]},
        "grid": {"extents": [[-8, 8]], "points": [64]}
    })");
    const RunConfig c = parse_config(doc);
    REQUIRE(c.state->coefficients.size() == 2);
    CHECK(c.state->coefficients[1] == Complex(0.0, 1.0));
    const Model m = build_model(*c.model);
    CHECK(build_state(*c.state, m).components().size() == 2);
}

TEST_CASE("check modes")
{
    CHECK(Check::make("a", 1.0, 1.05, 0.1, CheckMode::abs, Provenance::identity).pass);
    CHECK(!Check::make("a", 1.0, 1.2, 0.1, CheckMode::abs, Provenance::identity).pass);
    CHECK(Check::make("r", 100.0, 101.0, 0.011, CheckMode::rel, Provenance::identity).pass);
    CHECK(!Check::make("r", 100.0, 102.0, 0.011, CheckMode::rel, Provenance::identity).pass);
    CHECK(Check::make("m", 0.5, 0.0, 1.0, CheckMode::max, Provenance::threshold).pass);
    CHECK(!Check::make("m", 0.5, 0.6, 0.0, CheckMode::min, Provenance::oracle).pass);
    CHECK(!Check::make("n", std::nan(""), 0.0, 1.0, CheckMode::max, Provenance::identity).pass);
}

TEST_CASE("expect on hydrogen 211 reports L_z = 1")
{
    Json doc = hydrogen_expect();
    doc["grid"]["points"] = {16, 16, 16};
    const auto out = scratch("expect");
    const RunResult r = run(parse_config(doc), out);
    CHECK(r.exit == ExitCode::pass);
    const Json s = Json::parse(slurp(out / "expect" / "summary.json"));
    CHECK(s["status"] == "pass");
    CHECK(s["data"]["lz_mean"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    bool saw_lz = false;
    for (const auto& c : s["checks"]) {
        CHECK(c.contains("tolerance"));
        CHECK(c.contains("provenance"));
        if (c["name"] == "lz_mean") saw_lz = c["pass"].get<bool>();
    }
    CHECK(saw_lz);

    std::ifstream csv(out / "expect" / "fields.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x0,x1,x2,rho,v0,v1,v2,E,mask");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 16 * 16 * 16);
}

TEST_CASE("madelung-check on an eigenstate passes")
{
    Json doc = Json::parse(R"({
        "command": "madelung-check",
        "model": {"potential": "harmonic", "omega": 1.0},
        "state": {"kind": "harmonic", "n": [2]},
        "grid": {"extents": [[-10, 10]], "points": [128]}
    })");
    for (const char* source : {"exact", "analytic", "split_step"}) {
        doc["madelung"] = {{"source", source}, {"t", 0.3}, {"dt", 0.01}};
        CAPTURE(source);
        const RunResult r = run(parse_config(doc), scratch("madelung"));
        CHECK(r.exit == ExitCode::pass);
        CHECK(r.checks.size() == 3);
    }
}

TEST_CASE("unbounded potential is a config error")
{
    Json doc = gaussian_evolve();
    doc["model"] = {{"potential", "harmonic"}, {"omega", 1e200}};
    CHECK_THROWS_AS(run(parse_config(doc), scratch("unbounded")), ConfigError);
}

TEST_CASE("failing checks give exit 1 and a failure list")
{
    Json doc = gaussian_evolve();
    doc["tolerances"] = {{"energy_drift", -1.0}};
    const auto out = scratch("fail");
    const RunResult r = run(parse_config(doc), out);
    CHECK(r.exit == ExitCode::check_failure);
    CHECK(r.failures() == std::vector<std::string>{"energy_drift"});
    const Json s = Json::parse(slurp(out / "ge" / "summary.json"));
    CHECK(s["failures"] == Json::array({"energy_drift"}));
    CHECK(s["exit_code"] == 1);
}

TEST_CASE("non-finite evolution gives exit 3")
{
    Json doc = gaussian_evolve();
    doc["evolution"]["dt"] = 1e306;
    const auto out = scratch("abort");
    const RunResult r = run(parse_config(doc), out);
    CHECK(r.exit == ExitCode::numerical_abort);
    CHECK(!r.error.empty());
    CHECK(Json::parse(slurp(out / "ge" / "summary.json"))["status"] == "numerical_abort");
}

TEST_CASE("summaries are byte-identical for identical config and seed")
{
    Json doc = hydrogen_expect();
    doc["command"] = "sample";
    doc["seed"] = 99;
    doc["sample"] = {{"n", 20000}, {"bins", 16}};
    const RunConfig c = parse_config(doc);
    const auto a = scratch("repro_a");
    const auto b = scratch("repro_b");
    const RunResult ra = run(c, a);
    run(c, b);
    CHECK(ra.exit == ExitCode::pass);
    CHECK(slurp(a / "sample" / "summary.json") == slurp(b / "sample" / "summary.json"));
    CHECK(slurp(a / "sample" / "histogram.csv") == slurp(b / "sample" / "histogram.csv"));

    doc["seed"] = 100;
    const auto d = scratch("repro_d");
    run(parse_config(doc), d);
    CHECK(slurp(a / "sample" / "summary.json") != slurp(d / "sample" / "summary.json"));
}

TEST_CASE("committed example configs parse")
{
    for (const auto& entry : std::filesystem::directory_iterator(BORNLAB_DATA_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(parse_config(load_json(entry.path())));
    }
    CHECK_THROWS_AS(load_json("/nonexistent/config.json"), ConfigError);
}
