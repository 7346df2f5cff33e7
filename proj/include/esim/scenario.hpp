#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "esim/analysis.hpp"
#include "esim/consolidation.hpp"
#include "esim/network.hpp"
#include "esim/quotes.hpp"

namespace esim {

// Scenario files are JSON. Every dimensioned field carries its unit in the
// key (_us, _km, _m, _km2, _per_s); nothing is inferred.

struct NodeConfig {
    ExchangeId id = 0;
    std::string name;
    double lat = 0.0;
    double lon = 0.0;
    double alt_m = 0.0;
    double clock_rate = 1.0;
    bool gravitational_clock = false;  // clock_rate derived from alt_m

    bool operator==(const NodeConfig&) const = default;
};

struct NetworkConfig {
    DistanceMetric distance = DistanceMetric::Chord;
    std::optional<Medium> default_link;
    std::vector<NodeConfig> nodes;
    std::vector<Link> links;
    Network::SipLocation sip = ExchangeId{0};

    bool operator==(const NetworkConfig&) const = default;
};

struct PoissonStream {
    StreamSpec spec;  // duration_us is clipped to the horizon
    bool operator==(const PoissonStream&) const = default;
};
struct ShockStream {
    ShockSpec spec;
    bool operator==(const ShockStream&) const = default;
};
// Scripted event CSV; relative paths resolve against the config's directory.
struct EventsStream {
    std::string path;
    bool operator==(const EventsStream&) const = default;
};
// Built-in quote pair: bid 100 at exchange 1 (t = 50 us) and bid 101 at
// exchange 2 (t = 0), placed at the config network's nodes.
struct FixtureStream {
    std::string name = "theorem1";
    bool operator==(const FixtureStream&) const = default;
};

using StreamConfig = std::variant<PoissonStream, ShockStream, EventsStream, FixtureStream>;

struct ConventionConfig {
    enum class Kind { ArrivalOrder, LabFrameEmission, BoostedFrameEmission, UncertaintyInterval };

    std::string name;
    Kind kind = Kind::ArrivalOrder;
    std::optional<Vec3> velocity_km_per_us;                 // boosted: explicit frame
    std::optional<std::pair<EventId, EventId>> flip_events;  // boosted: frame that flips this pair
    double epsilon_us = 0.0;                                 // uncertainty interval

    bool operator==(const ConventionConfig&) const = default;
};

std::string_view to_string(ConventionConfig::Kind k);

struct OutputConfig {
    std::string dir = "out";
    bool interval_nbbo = true;
    bool causal_graph = true;

    bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    double horizon_us = 0.0;
    double lightcone_epsilon_km2 = kDefaultLightconeEpsilon;
    int n_securities = 1;
    NetworkConfig network;
    std::vector<StreamConfig> streams;
    std::vector<ConventionConfig> conventions;
    std::optional<FeedModel> feeds;
    OutputConfig outputs;

    bool operator==(const ScenarioConfig&) const = default;
};

// Throws ConfigError naming the line (syntax) or field path (validation).
ScenarioConfig parse_config(std::string_view text, std::string_view source_name = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical JSON; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

// Per-stream seed derived from the master seed and the stream's own seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t local);

struct NamedConvention {
    std::string name;
    Convention convention;
};

struct Scenario {
    Network network;
    std::vector<QuoteUpdate> quotes;  // emission order, all t < horizon
    std::vector<NamedConvention> conventions;
};

Network build_network(const NetworkConfig& config, std::uint64_t master_seed);

// Builds the network, generates or loads every stream and resolves the
// conventions. Throws ConfigError for bad inputs, NotSpacelike when a
// flip_events convention names a pair with absolute order.
Scenario build_scenario(const ScenarioConfig& config, const std::filesystem::path& base_dir);

}  // namespace esim
