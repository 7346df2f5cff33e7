#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "esim/network.hpp"
#include "esim/quotes.hpp"
#include "esim/spacetime.hpp"

namespace esim {

// =============================================================================
// Delivery to the SIP
// =============================================================================

struct ArrivalRecord {
    QuoteUpdate quote;
    double arrival_us = 0.0;  // lab time at the SIP position
    double delay_us = 0.0;

    bool operator==(const ArrivalRecord&) const = default;
};

// Propagates every quote to the SIP. Quotes from the SIP's own node arrive
// instantly; others use their SIP link or the network's default-link policy.
// The k-th quote over a link takes jitter draw k. Output is sorted by arrival
// time, then exchange id, then event id. Throws ConfigError when an exchange
// has no route, CausalityViolation if a delay undercuts light travel.
std::vector<ArrivalRecord> deliver(std::span<const QuoteUpdate> quotes, const Network& network);

// =============================================================================
// Simultaneity conventions
// =============================================================================

// "Current" means received at the SIP by time t.
struct ArrivalOrder {
    bool operator==(const ArrivalOrder&) const = default;
};
// "Current" means emitted by lab time t (omniscient lab observer).
struct LabFrameEmission {
    bool operator==(const LabFrameEmission&) const = default;
};
// "Current" means emitted by time t' in the boosted frame. The boost acts
// about `origin` (lab coordinates), which is mapped to itself; the default is
// the lab origin. The choice shifts t' but never changes the order.
struct BoostedFrameEmission {
    LorentzBoost boost;
    SpacetimeEvent origin;
    bool operator==(const BoostedFrameEmission&) const = default;
};
// Commit-wait: a quote stamped t is declared current once t + epsilon has passed.
struct UncertaintyInterval {
    double epsilon_us = 0.0;
    bool operator==(const UncertaintyInterval&) const = default;
};

using Convention = std::variant<ArrivalOrder, LabFrameEmission, BoostedFrameEmission, UncertaintyInterval>;

std::string describe(const Convention& c);

// Time coordinate at which a record becomes current under the convention.
double convention_time(const Convention& c, const ArrivalRecord& r);

// =============================================================================
// NBBO series
// =============================================================================

struct BestQuote {
    Ticks price_ticks = 0;
    ExchangeId exchange = 0;

    bool operator==(const BestQuote&) const = default;
};

struct NbboSample {
    double t_us = 0.0;
    std::optional<BestQuote> best_bid;
    std::optional<BestQuote> best_ask;
    bool crossed = false;

    bool operator==(const NbboSample&) const = default;
};

// Step function: one sample per change, strictly increasing times.
struct NbboSeries {
    std::vector<NbboSample> samples;

    bool empty() const noexcept { return samples.empty(); }
    std::size_t size() const noexcept { return samples.size(); }
    // State in force at t (nullptr before the first sample).
    const NbboSample* at(double t_us) const;

    bool operator==(const NbboSeries&) const = default;
};

// Best bid = max over each exchange's live bid, best ask = min over live asks;
// price ties go to the lowest exchange id. An exchange's live quote per side is
// the newest emission seen so far. Crossed books are flagged, not clamped.
NbboSeries consolidate(std::span<const ArrivalRecord> arrivals, const Convention& convention);

// Per-quote convention time, in the same order as `arrivals`. Boosted frames
// go through the batch SIMD kernels.
std::vector<double> convention_times(std::span<const ArrivalRecord> arrivals,
                                     const Convention& convention);

// =============================================================================
// Interval-of-uncertainty consolidation
// =============================================================================

struct IntervalNbboSample {
    double t_us = 0.0;
    std::vector<BestQuote> possible_best_bids;  // sorted by (price, exchange)
    std::vector<BestQuote> possible_best_asks;
    bool bid_may_be_empty = true;  // no bid may be live at t
    bool ask_may_be_empty = true;

    bool operator==(const IntervalNbboSample&) const = default;
};

struct IntervalNbbo {
    std::vector<IntervalNbboSample> samples;

    const IntervalNbboSample* at(double t_us) const;
};

// Each quote's emission is known only to lie in [t - eps, t + eps]; quotes from
// one exchange keep their program order. A (price, exchange) appears in the
// possible set at t when some admissible assignment of true emission times
// makes it the best quote.
IntervalNbbo consolidate_interval(std::span<const ArrivalRecord> arrivals, double epsilon_clock_us);

// =============================================================================
// Engineered-simultaneity conditions
// =============================================================================

struct EsReport {
    bool es1 = false;  // some cross-exchange quote pair is spacelike
    std::optional<std::pair<EventId, EventId>> es1_witness;
    bool es2 = false;  // an explicit simultaneity convention is in force
    std::string es2_convention;
};

// The witness is the first spacelike cross-exchange pair in emission order.
EsReport es_conditions(std::span<const QuoteUpdate> quotes, const Convention& convention,
                       double epsilon_km2 = kDefaultLightconeEpsilon);

// =============================================================================
// Flat record streams
// =============================================================================

// Header: t_us,bid_ticks,bid_venue,ask_ticks,ask_venue,crossed; missing sides print "null".
void write_series_csv(std::ostream& out, const NbboSeries& series);

// Header: event_id,exchange_id,side,price_ticks,size,t_emit_us,arrival_us,delay_us
void write_arrivals_csv(std::ostream& out, std::span<const ArrivalRecord> arrivals);

// Header: t_us,possible_bids,possible_asks,bid_may_be_empty,ask_may_be_empty
// with sets rendered as price@venue joined by ';'.
void write_interval_csv(std::ostream& out, const IntervalNbbo& nbbo);

// Shortest round-trip decimal rendering, used by every writer.
std::string format_double(double v);

}  // namespace esim
