#include <gtest/gtest.h>

#include <sstream>

#include "esim/causal.hpp"
#include "esim/error.hpp"
#include "support/generators.hpp"

using namespace esim;

namespace {

EventRef emit(EventId id) { return {id, EventKind::Emission}; }
EventRef arrive(EventId id) { return {id, EventKind::Arrival}; }

// Transitive closure by repeated squaring of the adjacency matrix.
std::vector<std::vector<bool>> closure(const CausalGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (const auto& e : g.edges()) r[e.from][e.to] = true;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!r[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (r[k][j]) r[i][j] = true;
            }
        }
    }
    return r;
}

struct Built {
    Network net;
    std::vector<QuoteUpdate> quotes;
    std::vector<ArrivalRecord> arrivals;
    CausalGraph graph;
};

Built random_graph(gen::Rng& rng, std::size_t n_quotes) {
    Network net = gen::network(rng, 4);
    auto quotes = gen::quotes(rng, net, n_quotes);
    auto arrivals = deliver(quotes, net);
    CausalGraph g = build_causal_graph(quotes, arrivals, net.sip_position());
    return {std::move(net), std::move(quotes), std::move(arrivals), std::move(g)};
}

}  // namespace

TEST(CausalGraph, TheoremOneStructure) {
    const Network net = theorem1_network();
    const auto quotes = theorem1_fixture();
    const auto arrivals = deliver(quotes, net);
    const CausalGraph g = build_causal_graph(quotes, arrivals, net.sip_position());
    EXPECT_EQ(g.size(), 4u);
    EXPECT_EQ(g.edges().size(), 3u);  // two messages, one SIP program edge
    const EventId a = theorem1::kAlpha;
    const EventId b = theorem1::kBeta;
    EXPECT_TRUE(concurrent(g, emit(a), emit(b)));
    EXPECT_TRUE(happened_before(g, emit(a), arrive(a)));
    EXPECT_TRUE(happened_before(g, emit(a), arrive(b)));  // via the SIP's receipt order
    EXPECT_FALSE(happened_before(g, emit(b), arrive(a)));
    EXPECT_FALSE(happened_before(g, emit(a), emit(a)));
    EXPECT_THROW(concurrent(g, emit(a), emit(a)), InvalidArgument);
    EXPECT_THROW(happened_before(g, emit(99), emit(a)), UnknownId);

    const LamportClockAssignment clocks = lamport_clocks(g);
    EXPECT_EQ(clocks.at(emit(a)), 1u);
    EXPECT_EQ(clocks.at(emit(b)), 1u);
    EXPECT_EQ(clocks.at(arrive(a)), 2u);
    EXPECT_EQ(clocks.at(arrive(b)), 3u);
}

TEST(CausalGraph, RejectsBadEdges) {
    CausalGraph g;
    const Vec3 here{6371, 0, 0};
    const Vec3 far{6371, 300, 0};
    g.add_event(emit(1), {1, here, 0.0}, {false, 1});
    g.add_event(emit(2), {2, here, 5.0}, {false, 2});
    g.add_event(arrive(1), {1, far, 100.0}, {true, 0});
    g.add_event(arrive(2), {2, far, 2000.0}, {true, 0});
    EXPECT_THROW(g.add_event(emit(1), {1, here, 0.0}, {false, 1}), InvalidArgument);
    EXPECT_THROW(g.add_program_edge(emit(1), emit(2)), InvalidArgument);
    EXPECT_THROW(g.add_program_edge(arrive(2), arrive(1)), InvalidArgument);
    // 300 km needs ~1000.7 us of light travel.
    EXPECT_THROW(g.add_message_edge(emit(1), arrive(1)), CausalityViolation);
    EXPECT_NO_THROW(g.add_message_edge(emit(2), arrive(2)));
    EXPECT_THROW(g.add_message_edge(emit(7), arrive(2)), UnknownId);
}

TEST(CausalGraph, HappenedBeforeMatchesClosure) {
    gen::Rng rng(40);
    for (int round = 0; round < 10; ++round) {
        const Built b = random_graph(rng, 60);
        const auto r = closure(b.graph);
        for (std::size_t i = 0; i < b.graph.size(); ++i) {
            for (std::size_t j = 0; j < b.graph.size(); ++j) {
                const EventRef x = b.graph.vertices()[i].ref;
                const EventRef y = b.graph.vertices()[j].ref;
                ASSERT_EQ(happened_before(b.graph, x, y), i != j && r[i][j]) << to_string(x) << " " << to_string(y);
            }
            const auto reach = reachable_from(b.graph, i);
            for (std::size_t j = 0; j < b.graph.size(); ++j) ASSERT_EQ(reach[j], r[i][j]);
        }
    }
}

TEST(CausalGraph, LamportClocksRespectEdges) {
    gen::Rng rng(41);
    const Built b = random_graph(rng, 500);
    const LamportClockAssignment clocks = lamport_clocks(b.graph);
    ASSERT_EQ(clocks.clocks.size(), b.graph.size());
    for (const auto& e : b.graph.edges()) {
        EXPECT_LT(clocks.at(b.graph.vertices()[e.from].ref), clocks.at(b.graph.vertices()[e.to].ref));
    }
    EXPECT_EQ(lamport_clocks(b.graph).clocks, clocks.clocks);
}

TEST(CausalGraph, EveryEdgeSurvivesEveryBoost) {
    gen::Rng rng(42);
    for (int round = 0; round < 10; ++round) {
        const Built b = random_graph(rng, 300);
        std::vector<LorentzBoost> boosts;
        for (int k = 0; k < 20; ++k) boosts.emplace_back(gen::velocity(rng, 0.99));
        const auto report = causal_consistency_check(b.graph, boosts);
        EXPECT_TRUE(report.ok()) << report.violations.size() << " violations";
        EXPECT_EQ(report.boosts_checked, 20u);
        EXPECT_EQ(report.edges_checked, b.graph.edges().size());
    }
}

TEST(CausalGraph, BoostedCoordinatesGiveTheSameRelation) {
    gen::Rng rng(43);
    const Built b = random_graph(rng, 80);
    const LorentzBoost boost(gen::velocity(rng, 0.9));
    CausalGraph boosted;
    for (const auto& v : b.graph.vertices()) boosted.add_event(v.ref, boost_event(boost, v.event), v.process);
    for (const auto& e : b.graph.edges()) {
        const EventRef from = b.graph.vertices()[e.from].ref;
        const EventRef to = b.graph.vertices()[e.to].ref;
        if (e.kind == EdgeKind::Program) {
            boosted.add_program_edge(from, to);
        } else {
            boosted.add_message_edge(from, to);
        }
    }
    for (const auto& x : b.graph.vertices()) {
        for (const auto& y : b.graph.vertices()) {
            ASSERT_EQ(happened_before(boosted, x.ref, y.ref), happened_before(b.graph, x.ref, y.ref));
        }
    }
}

TEST(CausalGraph, ArrivalForUnknownQuote) {
    const Network net = theorem1_network();
    auto quotes = theorem1_fixture();
    const auto arrivals = deliver(quotes, net);
    quotes.pop_back();
    EXPECT_THROW(build_causal_graph(quotes, arrivals, net.sip_position()), UnknownId);
}

TEST(CausalGraph, EdgeListCsv) {
    const Network net = theorem1_network();
    const auto quotes = theorem1_fixture();
    const CausalGraph g = build_causal_graph(quotes, deliver(quotes, net), net.sip_position());
    std::ostringstream out;
    write_edge_list(out, g);
    const std::string a = std::to_string(theorem1::kAlpha);
    const std::string b = std::to_string(theorem1::kBeta);
    EXPECT_EQ(out.str(), "from,to,kind\n"
                         "emit:" + a + ",arrive:" + a + ",message\n"
                         "emit:" + b + ",arrive:" + b + ",message\n"
                         "arrive:" + a + ",arrive:" + b + ",program\n");
}
