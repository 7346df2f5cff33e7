#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "esim/consolidation.hpp"
#include "esim/spacetime.hpp"

namespace esim {

// A quote emission or its receipt at the SIP. Arrival events reuse the quote's id.
enum class EventKind { Emission, Arrival };

struct EventRef {
    EventId id = 0;
    EventKind kind = EventKind::Emission;

    auto operator<=>(const EventRef&) const = default;
};

std::string to_string(const EventRef& r);

enum class EdgeKind { Program, Message };

std::string_view to_string(EdgeKind k);

// Happened-before graph over spacetime-located events.
//
// Program edges chain consecutive events at one process; message edges join a
// send to its receipt and must not outrun light. Built once, then read-only.
class CausalGraph {
public:
    // Location of a process: an exchange, or the SIP.
    struct Process {
        bool is_sip = false;
        ExchangeId exchange = 0;

        auto operator<=>(const Process&) const = default;
    };

    struct Vertex {
        EventRef ref;
        SpacetimeEvent event;
        Process process;
    };

    struct Edge {
        std::size_t from;
        std::size_t to;
        EdgeKind kind;
    };

    // Throws InvalidArgument on duplicate refs.
    std::size_t add_event(EventRef ref, const SpacetimeEvent& event, Process process);

    // Program edges require the same process and non-decreasing lab time.
    void add_program_edge(EventRef from, EventRef to);

    // Throws CausalityViolation when the receipt precedes light arrival.
    void add_message_edge(EventRef send, EventRef receive);

    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return vertices_.size(); }

    // Throws UnknownId.
    std::size_t index_of(EventRef ref) const;
    std::optional<std::size_t> find(EventRef ref) const;

    const std::vector<std::size_t>& successors(std::size_t v) const { return out_[v]; }
    const std::vector<std::size_t>& predecessors(std::size_t v) const { return in_[v]; }

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::pair<EventRef, std::size_t>> index_;  // sorted by ref
};

// Emissions with per-exchange program order, receipts at the SIP in arrival
// order at `sip_position`, one message edge per quote.
CausalGraph build_causal_graph(std::span<const QuoteUpdate> quotes,
                               std::span<const ArrivalRecord> arrivals, const Vec3& sip_position);

// b reachable from a (irreflexive).
bool happened_before(const CausalGraph& g, EventRef a, EventRef b);

// Neither happened before the other. Throws InvalidArgument for a == b.
bool concurrent(const CausalGraph& g, EventRef a, EventRef b);

// All vertices reachable from `from` (excluding itself), by vertex index.
std::vector<bool> reachable_from(const CausalGraph& g, std::size_t from);

struct LamportClockAssignment {
    std::vector<std::pair<EventRef, std::uint64_t>> clocks;  // sorted by ref

    std::uint64_t at(EventRef ref) const;
};

// Longest-path clocks in a topological order with ref tie-break; first events
// get 1. Throws CausalityViolation on a cycle.
LamportClockAssignment lamport_clocks(const CausalGraph& g);

struct OrderViolation {
    EventRef from;
    EventRef to;
    LorentzBoost boost;
    double dt_prime_us;  // t'_to - t'_from, negative for a violation
};

struct CausalConsistencyReport {
    std::size_t edges_checked = 0;
    std::size_t boosts_checked = 0;
    std::vector<OrderViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

// For every edge and boost, the target must not precede the source in the
// boosted frame (beyond tolerance).
CausalConsistencyReport causal_consistency_check(const CausalGraph& g,
                                                 std::span<const LorentzBoost> boosts,
                                                 double tolerance_us = kDefaultOrderTolerance);

// One line per edge: from,to,kind with refs rendered as emit:<id> / arrive:<id>.
void write_edge_list(std::ostream& out, const CausalGraph& g);

}  // namespace esim
