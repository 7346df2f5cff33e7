#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "esim/network.hpp"
#include "esim/spacetime.hpp"

namespace esim {

enum class Side { Bid, Ask };

std::string_view to_string(Side s);

using Ticks = std::int64_t;
using Shares = std::int64_t;

// A bid or ask emitted at an exchange; `event` is the emission in the lab frame.
struct QuoteUpdate {
    SpacetimeEvent event;
    ExchangeId exchange = 0;
    Side side = Side::Bid;
    Ticks price_ticks = 0;
    Shares size = 0;

    bool operator==(const QuoteUpdate&) const = default;
};

// Lab-frame emission order: time, then exchange id, then event id.
bool emission_before(const QuoteUpdate& a, const QuoteUpdate& b);

// Reflecting random walk of the mid price, one step per quote.
struct MidWalk {
    Ticks start_ticks = 10'000;
    Ticks step_ticks = 1;

    bool operator==(const MidWalk&) const = default;
};

struct StreamSpec {
    ExchangeId exchange = 0;
    std::uint64_t seed = 0;
    double rate_per_s = 1000.0;
    MidWalk mid_walk;
    Ticks spread_ticks = 2;
    Shares lot_shares = 100;
    std::int64_t max_lots = 10;
    double duration_us = 1e6;
    double start_us = 0.0;

    bool operator==(const StreamSpec&) const = default;
};

// Poisson quote arrivals at one exchange; each quote picks a side at random and
// prices it half a spread from the walking mid. Event ids are
// (exchange << 40) | sequence. Deterministic in the seed.
std::vector<QuoteUpdate> generate_stream(const StreamSpec& spec, const ExchangeNode& node);

// Several exchanges tracking one shared fundamental price that jumps by
// +/- jump_ticks at Poisson times. After each jump every exchange requotes both
// sides following its own response delay drawn from [response_min_us,
// response_max_us]. With jumps larger than the spread, the first responder
// prices through every slower exchange's stale quote.
struct ShockSpec {
    std::vector<ExchangeId> exchanges;
    std::uint64_t seed = 0;
    double shock_rate_per_s = 1.0 / 60.0;
    Ticks start_mid_ticks = 10'000;
    Ticks jump_ticks = 4;
    Ticks spread_ticks = 2;
    Shares size = 100;
    double response_min_us = 1.0;
    double response_max_us = 200.0;
    double duration_us = 60e6;

    bool operator==(const ShockSpec&) const = default;
};

std::vector<QuoteUpdate> generate_shock_streams(const ShockSpec& spec, const Network& network);

// =============================================================================
// Scripted fixtures
// =============================================================================

namespace theorem1 {
inline constexpr ExchangeId kExchangeA = 1;
inline constexpr ExchangeId kExchangeB = 2;
inline constexpr EventId kAlpha = 1;
inline constexpr EventId kBeta = 2;
inline constexpr double kSeparationKm = 43.0;
}  // namespace theorem1

// Two equatorial exchanges exactly 43 km apart (chord), fiber link with a
// 43 km override, SIP co-located with exchange A.
Network theorem1_network();

// alpha: bid 100 at A, t = 50 us; beta: bid 101 at B, t = 0 us.
std::vector<QuoteUpdate> theorem1_fixture();

// =============================================================================
// Scenario event files
// =============================================================================

// CSV with header
//   event_id,exchange_id,t_emit_us,side,price_ticks,size[,x_km,y_km,z_km]
// `#` starts a comment line. Positions, when present, must match the
// exchange within 1e-6 km. Output is in emission order (time, exchange,
// id); ids must be unique and per-exchange times strictly increasing.
// Errors are ConfigError with file:line context.
std::vector<QuoteUpdate> load_scenario(const std::filesystem::path& path, const Network& network);
std::vector<QuoteUpdate> parse_scenario_events(std::string_view text, const Network& network,
                                               std::string_view source_name = "<events>");

// Sorts by emission order and checks the stream invariants shared by all sources.
void validate_quotes(std::vector<QuoteUpdate>& quotes, const Network& network);

}  // namespace esim
