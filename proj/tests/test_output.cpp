#include <catch2/catch_amalgamated.hpp>

#include "heatmem/experiments.hpp"
#include "heatmem/output.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace heatmem;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool has_type(const json& value, const std::string& type)
{
    if (type == "object")
        return value.is_object();
    if (type == "array")
        return value.is_array();
    if (type == "string")
        return value.is_string();
    if (type == "boolean")
        return value.is_boolean();
    if (type == "null")
        return value.is_null();
    if (type == "integer")
        return value.is_number_integer();
    if (type == "number")
        return value.is_number();
    return false;
}

// The subset of JSON Schema used by the published summary schema.
void validate(const json& value, const json& schema, const std::string& path, std::vector<std::string>& errors)
{
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string())
            ok = has_type(value, t.get<std::string>());
        else
            for (const auto& alt : t)
                ok = ok || has_type(value, alt.get<std::string>());
        if (!ok) {
            errors.push_back(path + ": wrong type");
            return;
        }
    }
    if (schema.contains("enum") &&
        std::find(schema["enum"].begin(), schema["enum"].end(), value) == schema["enum"].end())
        errors.push_back(path + ": value not in enum");
    if (value.is_number()) {
        if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>())
            errors.push_back(path + ": below minimum");
        if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>())
            errors.push_back(path + ": above maximum");
    }
    if (value.is_object()) {
        for (const auto& key : schema.value("required", json::array()))
            if (!value.contains(key.get<std::string>()))
                errors.push_back(path + ": missing " + key.get<std::string>());
        const json props = schema.value("properties", json::object());
        for (const auto& [key, child] : value.items()) {
            if (props.contains(key)) {
                validate(child, props[key], path + "." + key, errors);
            } else if (schema.contains("additionalProperties")) {
                const json& extra = schema["additionalProperties"];
                if (extra.is_boolean() && !extra.get<bool>())
                    errors.push_back(path + ": unexpected " + key);
                else if (extra.is_object())
                    validate(child, extra, path + "." + key, errors);
            }
        }
    }
    if (value.is_array() && schema.contains("items"))
        for (std::size_t i = 0; i < value.size(); ++i)
            validate(value[i], schema["items"], path + "[" + std::to_string(i) + "]", errors);
}

json load_schema()
{
    return json::parse(read_file(std::filesystem::path(HEATMEM_DOCS_DIR) / "summary.schema.json"));
}

RunConfig quick_decay()
{
    RunConfig c = default_config(Experiment::decay);
    c.grid.nx = 16;
    c.grid.ny = 9;
    c.integration.dt = 1e-2;
    c.integration.t_final = 0.8;
    c.integration.report_stride = 1;
    return c;
}

}  // namespace

TEST_CASE("format_double round-trips", "[output][property]") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> exponent(-300.0, 300.0);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = mantissa(rng) * std::pow(10.0, exponent(rng));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("sha256 known vectors", "[output]") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("CSV tables", "[output]") {
    Table t{{"t", "energy"}, {{0.0, 1.5}, {0.1, std::numeric_limits<double>::quiet_NaN()}}};
    CHECK(t.to_csv() == "t,energy\n0,1.5\n0.1,nan\n");
}

TEST_CASE("manifest lists hashes sorted by name", "[output]") {
    const auto dir = std::filesystem::temp_directory_path() / "heatmem_manifest_test";
    std::filesystem::create_directories(dir);
    write_file(dir / "b.txt", "abc");
    write_file(dir / "a.txt", "");
    const std::string m = manifest(dir, {"b.txt", "a.txt"});
    CHECK(m == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855  a.txt\n"
               "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad  b.txt\n");
    std::filesystem::remove_all(dir);
}

TEST_CASE("artifacts are deterministic and the summary follows the schema", "[output]") {
    const RunConfig c = quick_decay();
    const ExperimentResult first = run_experiment(Experiment::decay, c);
    const ExperimentResult second = run_experiment(Experiment::decay, c);
    CHECK(first.series.to_csv() == second.series.to_csv());
    CHECK(summary_json(first, c) == summary_json(second, c));

    const auto dir = std::filesystem::temp_directory_path() / "heatmem_artifact_test";
    std::filesystem::remove_all(dir);
    const auto files = write_artifacts(first, c, dir);
    CHECK(files == std::vector<std::string>{"series.csv", "summary.json", "config.ini", "manifest.txt"});
    const std::string manifest_text = read_file(dir / "manifest.txt");
    CHECK(manifest_text.find(sha256_hex(read_file(dir / "series.csv"))) != std::string::npos);
    CHECK(render_config(parse_config(read_file(dir / "config.ini"))) == render_config(c));

    const json summary = json::parse(read_file(dir / "summary.json"));
    std::vector<std::string> errors;
    validate(summary, load_schema(), "$", errors);
    for (const auto& e : errors)
        UNSCOPED_INFO(e);
    CHECK(errors.empty());
    std::filesystem::remove_all(dir);
}

TEST_CASE("the validator rejects malformed summaries", "[output]") {
    const RunConfig c = quick_decay();
    json summary = json::parse(summary_json(run_experiment(Experiment::decay, c), c));
    const json schema = load_schema();
    std::vector<std::string> errors;

    json missing = summary;
    missing.erase("criteria");
    validate(missing, schema, "$", errors);
    CHECK_FALSE(errors.empty());

    errors.clear();
    json bad_verdict = summary;
    bad_verdict["criteria"][0]["verdict"] = "maybe";
    validate(bad_verdict, schema, "$", errors);
    CHECK_FALSE(errors.empty());
}

TEST_CASE("violated smallness yields out-of-hypothesis and a passing status", "[output]") {
    RunConfig c = quick_decay();
    c.boundary_kernel.rates = {10.0};
    const ExperimentResult r = run_experiment(Experiment::decay, c);
    const auto it = std::find_if(r.criteria.begin(), r.criteria.end(), [](const CriterionResult& x) { return x.id == 2; });
    REQUIRE(it != r.criteria.end());
    CHECK(it->verdict == Verdict::out_of_hypothesis);
    CHECK(r.passed());
    CHECK_FALSE(r.warnings.empty());
    const json summary = json::parse(summary_json(r, c));
    CHECK(summary["status"] == "pass");
    CHECK(summary["flags"]["absorbing_smallness"] == false);
}
