#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "esim/error.hpp"
#include "esim/scenario.hpp"

using namespace esim;

namespace {

const std::filesystem::path kScenarios = ESIM_SCENARIO_DIR;

const char* kMinimal = R"({
  "seed": 7,
  "horizon_us": 1000,
  "network": {
    "nodes": [
      {"id": 1, "name": "A", "lat": 40.0, "lon": -74.0},
      {"id": 2, "name": "B", "lat": 40.3, "lon": -74.2}
    ],
    "sip": {"node": 1}
  },
  "streams": [{"kind": "fixture", "name": "theorem1"}],
  "conventions": [{"name": "lab", "kind": "lab_frame_emission"}]
})";

std::string where_of(const std::string& text) {
    try {
        parse_config(text, "t.scenario");
    } catch (const ConfigError& e) {
        return e.where();
    }
    return "no error";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Config, ParsesMinimal) {
    const ScenarioConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.horizon_us, 1000.0);
    EXPECT_EQ(c.network.nodes.size(), 2u);
    EXPECT_EQ(c.network.nodes[1].name, "B");
    EXPECT_EQ(std::get<ExchangeId>(c.network.sip), 1u);
    EXPECT_EQ(c.conventions[0].kind, ConventionConfig::Kind::LabFrameEmission);
    EXPECT_EQ(c.outputs.dir, "out");
    EXPECT_FALSE(c.feeds);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
    EXPECT_EQ(where_of("{\n  \"seed\": 1,\n  oops\n}"), "t.scenario:3:3");
    EXPECT_EQ(where_of(""), "t.scenario:1:1");
}

TEST(Config, FieldErrorsCarryPaths) {
    const std::string m = kMinimal;
    EXPECT_EQ(where_of(replace(m, "\"seed\": 7,", "")), "t.scenario: seed");
    EXPECT_EQ(where_of(replace(m, "\"lat\": 40.0", "\"lat\": \"north\"")), "t.scenario: network.nodes[0].lat");
    EXPECT_EQ(where_of(replace(m, "\"lat\": 40.3", "\"lat\": 95")), "t.scenario: network.nodes[1].lat");
    EXPECT_EQ(where_of(replace(m, "\"horizon_us\": 1000", "\"horizon_us\": 1000, \"colour\": 1")),
              "t.scenario: colour");
    EXPECT_EQ(where_of(replace(m, "\"lab_frame_emission\"", "\"wall_clock\"")), "t.scenario: conventions[0].kind");
    EXPECT_EQ(where_of(replace(m, "\"sip\": {\"node\": 1}", "\"sip\": {\"node\": 9}")), "t.scenario: network.sip.node");
    EXPECT_EQ(where_of(replace(m, "\"name\": \"lab\"", "\"name\": \"a b\"")), "t.scenario: conventions[0].name");
    EXPECT_EQ(where_of(replace(m, "\"horizon_us\": 1000", "\"horizon_us\": -1")), "t.scenario: horizon_us");
    EXPECT_EQ(where_of(replace(m, "\"kind\": \"fixture\", \"name\": \"theorem1\"",
                                  "\"kind\": \"poisson\", \"exchange\": 4, \"seed\": 1, \"rate_per_s\": 10")),
              "t.scenario: streams[0].exchange");
    EXPECT_EQ(where_of(replace(m, "\"kind\": \"lab_frame_emission\"",
                                  "\"kind\": \"boosted_frame_emission\", \"velocity_km_per_us\": [0.3, 0, 0]")),
              "t.scenario: conventions[0].velocity_km_per_us");
}

TEST(Config, RejectsStructuralGaps) {
    const std::string m = kMinimal;
    EXPECT_THROW(parse_config(replace(m, R"([{"kind": "fixture", "name": "theorem1"}])", "[]")), ConfigError);
    EXPECT_THROW(parse_config(replace(m, R"([{"name": "lab", "kind": "lab_frame_emission"}])",
                                      R"([{"name": "x", "kind": "arrival_order"}, {"name": "x", "kind": "arrival_order"}])")),
                 ConfigError);
    EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
}

TEST(Config, RoundTripsEveryShippedScenario) {
    for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".scenario") continue;
        SCOPED_TRACE(entry.path().filename().string());
        const ScenarioConfig c = load_config(entry.path());
        const std::string text = serialize_config(c);
        EXPECT_EQ(parse_config(text), c);
        EXPECT_EQ(serialize_config(parse_config(text)), text);
    }
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/x.scenario"), ConfigError); }

TEST(Seeds, DerivedSeedsDifferAndRepeat) {
    EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
    EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
    EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
    EXPECT_NE(derive_seed(1, 2), derive_seed(2, 1));
}

TEST(Build, TheoremOneScenario) {
    const ScenarioConfig c = load_config(kScenarios / "theorem1.scenario");
    const Scenario s = build_scenario(c, kScenarios);
    ASSERT_EQ(s.quotes.size(), 2u);
    EXPECT_EQ(s.quotes[0].event.t, 0.0);
    EXPECT_NEAR((s.quotes[0].event.x - s.quotes[1].event.x).norm(), 43.0, 1e-6);
    ASSERT_EQ(s.conventions.size(), 3u);
    EXPECT_EQ(s.conventions[2].name, "flipped");
    const auto& boosted = std::get<BoostedFrameEmission>(s.conventions[2].convention);
    EXPECT_NEAR(boosted.boost.beta(), 0.35208, 1e-4);
    EXPECT_EQ(boosted.origin.t, 25.0);
}

TEST(Build, SeedChangesGeneratedStreams) {
    ScenarioConfig c = load_config(kScenarios / "races.scenario");
    c.horizon_us = 50'000.0;
    const Scenario a = build_scenario(c, kScenarios);
    const Scenario b = build_scenario(c, kScenarios);
    EXPECT_EQ(a.quotes, b.quotes);
    c.seed += 1;
    EXPECT_NE(build_scenario(c, kScenarios).quotes, a.quotes);
    for (const QuoteUpdate& q : a.quotes) EXPECT_LT(q.event.t, 50'000.0);
}

TEST(Build, ZeroHorizonYieldsNoQuotes) {
    ScenarioConfig c = load_config(kScenarios / "us_equities.scenario");
    c.horizon_us = 0.0;
    EXPECT_TRUE(build_scenario(c, kScenarios).quotes.empty());
}

TEST(Build, FlipOfTimelikePairFails) {
    ScenarioConfig c = parse_config(kMinimal);
    c.horizon_us = 1000.0;
    ConventionConfig flip;
    flip.name = "flip";
    flip.kind = ConventionConfig::Kind::BoostedFrameEmission;
    flip.flip_events = std::pair<EventId, EventId>{1, 2};
    c.conventions.push_back(flip);
    // ~35 km apart, 50 us apart: spacelike, builds fine.
    EXPECT_NO_THROW(build_scenario(c, kScenarios));
    c.network.nodes[1].lat = 40.0001;
    c.network.nodes[1].lon = -74.0;
    EXPECT_THROW(build_scenario(c, kScenarios), NotSpacelike);
}

TEST(Build, EventsFileResolvesRelativeToConfig) {
    const ScenarioConfig c = load_config(kScenarios / "fig1.scenario");
    const Scenario s = build_scenario(c, kScenarios);
    ASSERT_EQ(s.quotes.size(), 2u);
    EXPECT_EQ(s.quotes[1].exchange, 5u);
    EXPECT_THROW(build_scenario(c, "/nonexistent"), ConfigError);
}
