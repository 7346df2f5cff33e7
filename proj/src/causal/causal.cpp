#include "esim/causal.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>

#include "esim/error.hpp"
#include "esim/kernels.hpp"

namespace esim {

namespace {

constexpr double kTimeSlackUs = 1e-9;

}  // namespace

std::string to_string(const EventRef& r) {
    return (r.kind == EventKind::Emission ? "emit:" : "arrive:") + std::to_string(r.id);
}

std::string_view to_string(EdgeKind k) { return k == EdgeKind::Program ? "program" : "message"; }

// ---- graph --------------------------------------------------------------------

std::optional<std::size_t> CausalGraph::find(EventRef ref) const {
    auto it = std::lower_bound(index_.begin(), index_.end(), ref,
                               [](const auto& e, const EventRef& r) { return e.first < r; });
    if (it == index_.end() || it->first != ref) return std::nullopt;
    return it->second;
}

std::size_t CausalGraph::index_of(EventRef ref) const {
    if (auto i = find(ref)) return *i;
    throw UnknownId("unknown event " + to_string(ref));
}

std::size_t CausalGraph::add_event(EventRef ref, const SpacetimeEvent& event, Process process) {
    auto it = std::lower_bound(index_.begin(), index_.end(), ref,
                               [](const auto& e, const EventRef& r) { return e.first < r; });
    if (it != index_.end() && it->first == ref) {
        throw InvalidArgument("duplicate event " + to_string(ref));
    }
    const std::size_t v = vertices_.size();
    vertices_.push_back({ref, event, process});
    out_.emplace_back();
    in_.emplace_back();
    index_.insert(it, {ref, v});
    return v;
}

void CausalGraph::add_program_edge(EventRef from, EventRef to) {
    const std::size_t a = index_of(from);
    const std::size_t b = index_of(to);
    if (vertices_[a].process != vertices_[b].process) {
        throw InvalidArgument("program edge " + to_string(from) + " -> " + to_string(to) +
                              " crosses processes");
    }
    if (vertices_[b].event.t < vertices_[a].event.t) {
        throw InvalidArgument("program edge " + to_string(from) + " -> " + to_string(to) +
                              " runs backwards in time");
    }
    edges_.push_back({a, b, EdgeKind::Program});
    out_[a].push_back(b);
    in_[b].push_back(a);
}

void CausalGraph::add_message_edge(EventRef send, EventRef receive) {
    const std::size_t a = index_of(send);
    const std::size_t b = index_of(receive);
    const SpacetimeEvent& s = vertices_[a].event;
    const SpacetimeEvent& r = vertices_[b].event;
    const double needed = light_time((r.x - s.x).norm());
    if (r.t - s.t + kTimeSlackUs < needed * (1.0 - 1e-12)) {
        throw CausalityViolation("message " + to_string(send) + " -> " + to_string(receive) +
                                 " is superluminal: " + std::to_string(r.t - s.t) + " us < " +
                                 std::to_string(needed) + " us light time");
    }
    edges_.push_back({a, b, EdgeKind::Message});
    out_[a].push_back(b);
    in_[b].push_back(a);
}

CausalGraph build_causal_graph(std::span<const QuoteUpdate> quotes,
                               std::span<const ArrivalRecord> arrivals, const Vec3& sip_position) {
    CausalGraph g;
    const CausalGraph::Process sip{true, 0};

    std::vector<const QuoteUpdate*> emitted;
    for (const QuoteUpdate& q : quotes) emitted.push_back(&q);
    std::sort(emitted.begin(), emitted.end(),
              [](const QuoteUpdate* a, const QuoteUpdate* b) { return emission_before(*a, *b); });

    std::map<ExchangeId, EventRef> last_at;
    for (const QuoteUpdate* q : emitted) {
        const EventRef ref{q->event.id, EventKind::Emission};
        g.add_event(ref, q->event, {false, q->exchange});
        if (auto it = last_at.find(q->exchange); it != last_at.end()) g.add_program_edge(it->second, ref);
        last_at[q->exchange] = ref;
    }

    // Receipts are program-ordered at the SIP in delivery order: the arrival
    // convention made explicit as graph structure.
    std::optional<EventRef> last_arrival;
    for (const ArrivalRecord& r : arrivals) {
        const EventRef emission{r.quote.event.id, EventKind::Emission};
        const EventRef ref{r.quote.event.id, EventKind::Arrival};
        if (!g.find(emission)) {
            throw UnknownId("arrival for unknown quote " + std::to_string(r.quote.event.id));
        }
        g.add_event(ref, {r.quote.event.id, sip_position, r.arrival_us}, sip);
        g.add_message_edge(emission, ref);
        if (last_arrival) g.add_program_edge(*last_arrival, ref);
        last_arrival = ref;
    }
    return g;
}

// ---- queries ------------------------------------------------------------------

std::vector<bool> reachable_from(const CausalGraph& g, std::size_t from) {
    std::vector<bool> seen(g.size(), false);
    std::deque<std::size_t> frontier{from};
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop_front();
        for (std::size_t w : g.successors(v)) {
            if (!seen[w]) {
                seen[w] = true;
                frontier.push_back(w);
            }
        }
    }
    return seen;
}

bool happened_before(const CausalGraph& g, EventRef a, EventRef b) {
    const std::size_t from = g.index_of(a);
    const std::size_t to = g.index_of(b);
    if (from == to) return false;
    // Every edge is non-decreasing in lab time, so nothing later than b can lead to it.
    const double limit = g.vertices()[to].event.t + kTimeSlackUs;
    std::vector<bool> seen(g.size(), false);
    std::deque<std::size_t> frontier{from};
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop_front();
        for (std::size_t w : g.successors(v)) {
            if (w == to) return true;
            if (!seen[w] && g.vertices()[w].event.t <= limit) {
                seen[w] = true;
                frontier.push_back(w);
            }
        }
    }
    return false;
}

bool concurrent(const CausalGraph& g, EventRef a, EventRef b) {
    if (a == b) throw InvalidArgument("concurrency needs two distinct events");
    return !happened_before(g, a, b) && !happened_before(g, b, a);
}

std::uint64_t LamportClockAssignment::at(EventRef ref) const {
    auto it = std::lower_bound(clocks.begin(), clocks.end(), ref,
                               [](const auto& e, const EventRef& r) { return e.first < r; });
    if (it == clocks.end() || it->first != ref) throw UnknownId("no clock for " + to_string(ref));
    return it->second;
}

LamportClockAssignment lamport_clocks(const CausalGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::size_t> pending(n);
    for (std::size_t v = 0; v < n; ++v) pending[v] = g.predecessors(v).size();

    using Item = std::pair<EventRef, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (pending[v] == 0) ready.emplace(g.vertices()[v].ref, v);
    }

    std::vector<std::uint64_t> clock(n, 0);
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::size_t v = ready.top().second;
        ready.pop();
        ++visited;
        std::uint64_t c = 0;
        for (std::size_t p : g.predecessors(v)) c = std::max(c, clock[p]);
        clock[v] = c + 1;
        for (std::size_t w : g.successors(v)) {
            if (--pending[w] == 0) ready.emplace(g.vertices()[w].ref, w);
        }
    }
    if (visited != n) throw CausalityViolation("causal graph contains a cycle");

    LamportClockAssignment out;
    out.clocks.reserve(n);
    for (std::size_t v = 0; v < n; ++v) out.clocks.emplace_back(g.vertices()[v].ref, clock[v]);
    std::sort(out.clocks.begin(), out.clocks.end());
    return out;
}

CausalConsistencyReport causal_consistency_check(const CausalGraph& g,
                                                 std::span<const LorentzBoost> boosts,
                                                 double tolerance_us) {
    CausalConsistencyReport report;
    report.edges_checked = g.edges().size();
    report.boosts_checked = boosts.size();
    if (g.edges().empty() || boosts.empty()) return report;

    kernels::EventColumns cols(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
        const SpacetimeEvent& e = g.vertices()[v].event;
        cols.t[v] = e.t;
        cols.x[v] = e.x.x;
        cols.y[v] = e.x.y;
        cols.z[v] = e.x.z;
    }
    std::vector<double> tp(g.size());
    for (const LorentzBoost& boost : boosts) {
        kernels::boosted_times(boost, cols.view(), tp);
        for (const auto& edge : g.edges()) {
            const double dt = tp[edge.to] - tp[edge.from];
            if (dt < -tolerance_us) {
                report.violations.push_back(
                    {g.vertices()[edge.from].ref, g.vertices()[edge.to].ref, boost, dt});
            }
        }
    }
    return report;
}

void write_edge_list(std::ostream& out, const CausalGraph& g) {
    out << "from,to,kind\n";
    for (const auto& e : g.edges()) {
        out << to_string(g.vertices()[e.from].ref) << ',' << to_string(g.vertices()[e.to].ref) << ','
            << to_string(e.kind) << '\n';
    }
}

}  // namespace esim
