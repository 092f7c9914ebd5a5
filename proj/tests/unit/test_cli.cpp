#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "smartcore/cli/policy_state.hpp"
#include "smartcore/cli/report.hpp"
#include "smartcore/cli/scenario.hpp"

using namespace smartcore;
using namespace smartcore::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SMARTCORE_DATA_DIR;

fs::path write_temp(const std::string& name, const std::string& text) {
    fs::path p = fs::temp_directory_path() / ("smartcore_cli_" + name);
    std::ofstream(p, std::ios::trunc) << text;
    return p;
}

json without_timestamp(const Report& r) {
    json j = to_json(r);
    j.erase("timestamp");
    return j;
}

}  // namespace

TEST(Scenario, LoadsBundledScenarios) {
    for (const auto& e : fs::directory_iterator(kData / "scenarios")) {
        auto sc = load_scenario(e.path());
        EXPECT_FALSE(sc.name.empty()) << e.path();
        EXPECT_FALSE(sc.expectations.empty()) << e.path();
    }
}

TEST(Scenario, ParseErrorCarriesLine) {
    auto p = write_temp("syntax.json", "{\n  \"name\": \"x\",\n  \"seed\": ,\n}\n");
    try {
        load_scenario(p);
        FAIL();
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find(p.filename().string()), std::string::npos);
    }
}

TEST(Scenario, InvalidValueCarriesLine) {
    auto p = write_temp("value.json",
                        "{\n  \"name\": \"x\",\n  \"duration_s\": 10,\n  \"principals\": [\n"
                        "    {\"id\": \"a\", \"profile\": \"insurance\", \"rate_limit\": -3}\n  ]\n}\n");
    try {
        load_scenario(p);
        FAIL();
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.line(), 5u);
    }
}

TEST(Scenario, RejectsUnknownKeysAndMissingFiles) {
    EXPECT_THROW(scenario_from_json(json{{"name", "x"}, {"bogus", 1}}, "."), ScenarioError);
    EXPECT_THROW(scenario_from_json(json{{"name", "x"}, {"trace", "missing.csv"}}, "/nonexistent"), ScenarioError);
    EXPECT_THROW(scenario_from_json(json{{"name", "x"}, {"expectations", {{{"metric", "m"}, {"op", "!="}, {"value", 1}}}}}, "."),
                 ScenarioError);
}

TEST(Expectations, Operators) {
    std::vector<MetricRow> m{{"a", 10, ""}, {"b", 2, ""}};
    auto check = [&](Expectation e) { return check_expectations({e}, m).front(); };
    EXPECT_TRUE(check({"a", "<=", 10}).passed);
    EXPECT_FALSE(check({"a", "<", 10}).passed);
    EXPECT_TRUE(check({"a", ">=", 0, "b", 5}).passed);
    EXPECT_FALSE(check({"a", ">", 0, "b", 5}).passed);
    EXPECT_TRUE(check({"a", "approx", 10.4, {}, 1, 0.05}).passed);
    EXPECT_FALSE(check({"a", "approx", 12, {}, 1, 0.05}).passed);
    auto missing = check({"zzz", "==", 1});
    EXPECT_FALSE(missing.passed);
    EXPECT_FALSE(missing.actual.has_value());
}

TEST(Run, DeterministicApartFromTimestamp) {
    auto sc = load_scenario(kData / "scenarios" / "dos_limited.json");
    auto a = run_scenario(sc);
    auto b = run_scenario(sc);
    EXPECT_EQ(without_timestamp(a), without_timestamp(b));
    EXPECT_TRUE(a.passed());
    auto j = to_json(a);
    EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
    for (const char* key : {"scenario", "seed", "config", "metrics", "probe_summary", "expectations", "passed", "timestamp"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_FALSE(render_text(a).empty());
}

TEST(Run, SeedChangesOutcome) {
    auto sc = load_scenario(kData / "scenarios" / "insurance_noise.json");
    auto a = run_scenario(sc);
    sc.seed += 1;
    if (sc.privacy) sc.privacy->config.seed += 1;
    auto b = run_scenario(sc);
    EXPECT_NE(without_timestamp(a)["metrics"], without_timestamp(b)["metrics"]);
}

TEST(PolicyState, AddListRemove) {
    auto path = fs::temp_directory_path() / "smartcore_cli_state.json";
    fs::remove(path);
    auto st = load_policy_state(path);
    EXPECT_TRUE(st.principals.empty());
    std::vector<json> cmds{
        {{"op", "attach"}, {"principal", "ins"}, {"args", {{"kind", "dongle"}, {"profile", "insurance"}}}},
        {{"op", "policy_add"},
         {"principal", "ins"},
         {"args", {{"policy", {{"id", "rpm"}, {"resource", {"0x0C"}}, {"effect", "allow"}, {"priority", 100}}}}}}};
    auto rs = apply_policy_commands(st, cmds);
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_TRUE(rs[1]["ok"]) << rs[1].dump();
    ASSERT_EQ(st.user_policies.size(), 1u);
    save_policy_state(path, st);
    auto loaded = load_policy_state(path);
    EXPECT_EQ(loaded.user_policies, st.user_policies);

    auto before = loaded.user_policies;
    rs = apply_policy_commands(loaded, {{{"op", "policy_rm"}, {"args", {{"id", "nope"}}}}});
    EXPECT_FALSE(rs.back()["ok"]);
    EXPECT_EQ(loaded.user_policies, before);
    rs = apply_policy_commands(loaded, {{{"op", "policy_rm"}, {"args", {{"id", "rpm"}}}}});
    EXPECT_TRUE(rs.back()["ok"]);
    EXPECT_TRUE(loaded.user_policies.empty());
    fs::remove(path);
}
