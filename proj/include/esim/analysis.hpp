#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "esim/consolidation.hpp"
#include "esim/network.hpp"
#include "esim/quotes.hpp"

namespace esim {

// =============================================================================
// Convention divergence
// =============================================================================

struct NbboState {
    std::optional<BestQuote> best_bid;
    std::optional<BestQuote> best_ask;

    bool operator==(const NbboState&) const = default;
};

struct DisagreementWindow {
    double start_us = 0.0;
    double end_us = 0.0;
    NbboState first;
    NbboState second;
};

struct DivergenceReport {
    double origin_us = 0.0;
    double total_time_us = 0.0;  // horizon - origin
    std::vector<DisagreementWindow> windows;
    double disagreement_fraction = 0.0;
};

// Compares two NBBO step functions on [origin, horizon). A series publishes
// nothing before its first sample; only instants where both series have
// published are compared. Prices and venues compare exactly. Windows are
// split wherever either series changes.
DivergenceReport nbbo_divergence(const NbboSeries& s1, const NbboSeries& s2, double origin_us,
                                 double horizon_us);

inline DivergenceReport nbbo_divergence(const NbboSeries& s1, const NbboSeries& s2, double horizon_us) {
    return nbbo_divergence(s1, s2, 0.0, horizon_us);
}

// =============================================================================
// Frame-flip witness
// =============================================================================

struct Theorem1Witness {
    NbboSeries frame_s;        // lab-frame emission order
    NbboSeries frame_sprime;   // emission order in the flipped frame
    LorentzBoost boost;
    SpacetimeEvent boost_origin;
    std::vector<EventId> order_s;       // event ids in frame S order
    std::vector<EventId> order_sprime;  // event ids in frame S' order
    DivergenceReport divergence;
};

// Consolidates a spacelike quote pair in the lab frame and in the frame given
// by flip_boost (acting about the pair's spacetime midpoint, so both frames
// share a clock reading there), then measures where the two series disagree.
// The comparison span runs from the earliest sample of either series to one
// span-length past the latest. Throws NotSpacelike.
Theorem1Witness theorem1_witness(const QuoteUpdate& alpha, const QuoteUpdate& beta,
                                 const Network& network, double margin = kDefaultFlipMargin);

// =============================================================================
// Latency-arbitrage races
// =============================================================================

struct FeedModel {
    double delta_direct_us = 20.0;
    double delta_sip_us = 1128.0;
    double reaction_us = 0.0;
    // Extra non-negative reaction delay of the fast participant, drawn per race.
    std::optional<JitterSpec> reaction_jitter;

    // delta_direct < delta_sip and every latency >= 0.
    bool valid() const;
    // delta_sip - delta_direct - reaction.
    double race_window_us() const { return delta_sip_us - delta_direct_us - reaction_us; }
    double feed_ratio() const { return delta_sip_us / delta_direct_us; }

    bool operator==(const FeedModel&) const = default;
};

enum class Winner { Fast, Slow };

std::string_view to_string(Winner w);

struct RaceEvent {
    QuoteUpdate trigger;
    QuoteUpdate stale_quote;
    double window_us = 0.0;
    Winner winner = Winner::Fast;
    Ticks improvement_ticks = 0;
    std::int64_t profit = 0;  // ticks x shares
};

// A race is recorded when a quote prices through a live opposite-side quote at
// another exchange (bid above a resting ask, or ask below a resting bid) and
// the feed window is positive. Liveness follows lab emission order. Without
// reaction jitter the fast participant always wins; with it, the k-th race is
// won iff draw k stays inside the window.
std::vector<RaceEvent> detect_races(std::span<const ArrivalRecord> arrivals, const FeedModel& feeds);

struct RaceSummary {
    std::size_t races = 0;
    double races_per_minute_per_security = 0.0;
    double fast_win_fraction = 0.0;
    std::int64_t total_profit = 0;
};

RaceSummary race_summary(std::span<const RaceEvent> races, double duration_us, int n_securities);

// Header: trigger_id,trigger_exchange,trigger_side,trigger_price,stale_id,
//         stale_exchange,stale_price,window_us,winner,improvement_ticks,profit
void write_races_csv(std::ostream& out, std::span<const RaceEvent> races);

}  // namespace esim
