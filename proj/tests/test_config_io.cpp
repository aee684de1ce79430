#include <doctest.h>

#include <filesystem>
#include <string>

#include "paam/analysis.hpp"
#include "paam/config_io.hpp"
#include "paam/experiments.hpp"

using namespace paam;

namespace {

const char* kIsolated = R"({
  "schema_version": 1,
  "time_unit": "ms",
  "cores": 2,
  "accelerators": [
    {"id": "gpu0", "buckets": 1, "epsilon": 0, "kappa": 0, "server_core": 1}
  ],
  "executors": [
    {"id": "exec0", "core": 0, "priority": 10, "callbacks": ["cb0"]}
  ],
  "callbacks": [
    {"id": "cb0", "segments": [
      {"kind": "cpu", "wcet": 2},
      {"kind": "accel", "wcet": "3000us", "accelerator": "gpu0"}
    ]}
  ],
  "chains": [
    {"id": "chain0", "callbacks": ["cb0"], "period": 20, "priority": 1}
  ]
})";

ConfigError config_error(const std::string& text) {
    try {
        parse_system(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("parsed without error");
    return ConfigError("", "", 0, 0);
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("parse a small config with unit handling and defaults") {
    const auto sys = parse_system(kIsolated);
    CHECK(sys.cores == 2);
    CHECK(sys.callbacks[0].segments[0].wcet == Duration::ms(2));
    CHECK(sys.callbacks[0].segments[1].wcet == Duration::ms(3));
    CHECK(sys.chains[0].deadline == Duration::ms(20));
    CHECK(sys.chains[0].criticality == Criticality::Critical);
    CHECK(sys.executors[0].wait == WaitPolicy::Spin);
}

TEST_CASE("unknown key is rejected and anchored") {
    const auto text = replace(kIsolated, R"("priority": 1})", R"("priority": 1, "prio": 2})");
    const auto e = config_error(text);
    CHECK(std::string(e.what()).find("unknown key 'prio'") != std::string::npos);
    CHECK(e.line() == 18);
}

TEST_CASE("semantic error carries the line of the offending value") {
    const auto text = replace(kIsolated, R"("period": 20)", R"("period": 20, "deadline": 30)");
    const auto e = config_error(text);
    CHECK(std::string(e.what()).find("deadline exceeds period") != std::string::npos);
    CHECK(e.path() == "/chains/0/deadline");
    CHECK(e.line() == 18);
    CHECK(e.column() > 1);
    CHECK(e.describe("sys.json").rfind("sys.json:18:", 0) == 0);
}

TEST_CASE("syntax errors report a position") {
    const auto e = config_error("{\n  \"cores\": 1\n  \"x\": 2\n}");
    CHECK(e.line() == 3);
}

TEST_CASE("wrong types and missing keys") {
    CHECK_THROWS_AS(parse_system(replace(kIsolated, R"("cores": 2)", R"("cores": "two")")), ConfigError);
    CHECK_THROWS_AS(parse_system(replace(kIsolated, R"("cores": 2,)", "")), ConfigError);
    CHECK_THROWS_AS(parse_system(replace(kIsolated, R"("time_unit": "ms")", R"("time_unit": "fortnight")")),
                    ConfigError);
    CHECK_THROWS_AS(parse_system(replace(kIsolated, R"("schema_version": 1)", R"("schema_version": 9)")),
                    ConfigError);
    CHECK_THROWS_AS(parse_system(replace(kIsolated, R"("kind": "cpu")", R"("kind": "fpga")")), ConfigError);
}

TEST_CASE("canonical dump round-trips with a stable fingerprint") {
    const auto sys = parse_system(kIsolated);
    const auto text = dump_system_spec(sys.source);
    const auto again = parse_system(text);
    CHECK(dump_system_spec(again.source) == text);
    CHECK(fingerprint(again) == fingerprint(sys));
    CHECK(fingerprint(sys).size() == 16);

    auto other = sys.source;
    other.chains[0].period = Duration::ms(21);
    CHECK(fingerprint(validate_system(other)) != fingerprint(sys));
}

TEST_CASE("locate_json_pointer") {
    const std::string text = "{\n  \"a\": [\n    1,\n    {\"b\": true}\n  ]\n}";
    CHECK(locate_json_pointer(text, "/a/1/b") == std::make_pair(4, 11));
    CHECK(locate_json_pointer(text, "/a/0") == std::make_pair(3, 5));
    // missing leaf falls back to the deepest ancestor
    CHECK(locate_json_pointer(text, "/a/1/zzz") == std::make_pair(4, 5));
    CHECK_FALSE(locate_json_pointer("{", "/a").has_value());
}

TEST_CASE("candidate documents") {
    const auto cand = parse_candidate(R"({
      "time_unit": "ms",
      "callbacks": [{"id": "n", "segments": [{"kind": "cpu", "wcet": 1}]}],
      "chains": [{"id": "new", "callbacks": ["n"], "period": 100, "priority": 3}],
      "executor_assignments": [{"executor": "exec0", "callbacks": ["n"]}]
    })");
    REQUIRE(cand.attachments.size() == 1);
    CHECK(cand.attachments[0].executor == "exec0");
    CHECK(cand.additions.chains[0].period == Duration::ms(100));
    CHECK_THROWS_AS(parse_candidate(R"({"cores": 3})"), ConfigError);
}

TEST_CASE("bundled scenario files parse") {
    const std::string dir = std::string(PAAM_SOURCE_DIR) + "/experiments/";
    const auto iso = load_system(dir + "isolated_chain.json");
    CHECK(iso.chains.size() == 1);
    const auto over = load_system(dir + "overloaded_gpu.json");
    CHECK(fingerprint(over) == fingerprint(validate_system(overloaded_scenario_spec())));
}

TEST_CASE("every bundled scenario validates and its critical chains are bounded") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(std::string(PAAM_SOURCE_DIR) + "/experiments")) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().filename().string());
        const auto sys = load_system(entry.path());
        const auto report = analyze(sys);
        CHECK(report.schedulable);
        ++seen;
    }
    CHECK(seen >= 4);
}
