#include <gtest/gtest.h>

#include <map>
#include <set>

#include "esim/consolidation.hpp"
#include "esim/error.hpp"
#include "esim/quotes.hpp"

using namespace esim;
using namespace esim::us_equities_sites;

namespace {

StreamSpec spec(std::uint64_t seed) {
    StreamSpec s;
    s.exchange = kCarteret;
    s.seed = seed;
    s.rate_per_s = 5000.0;
    s.duration_us = 200'000.0;
    return s;
}

}  // namespace

TEST(Stream, SeededAndReproducible) {
    const Network net = us_equities_network();
    const auto a = generate_stream(spec(1), net.node(kCarteret));
    const auto b = generate_stream(spec(1), net.node(kCarteret));
    const auto c = generate_stream(spec(2), net.node(kCarteret));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    // ~1000 quotes expected at 5000/s over 0.2 s.
    EXPECT_GT(a.size(), 800u);
    EXPECT_LT(a.size(), 1200u);
}

TEST(Stream, Invariants) {
    const Network net = us_equities_network();
    const auto q = generate_stream(spec(3), net.node(kCarteret));
    std::set<EventId> ids;
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_TRUE(ids.insert(q[i].event.id).second);
        EXPECT_GT(q[i].price_ticks, 0);
        EXPECT_GT(q[i].size, 0);
        EXPECT_EQ(q[i].size % 100, 0);
        EXPECT_EQ(q[i].exchange, kCarteret);
        EXPECT_EQ(q[i].event.x, net.node(kCarteret).position);
        EXPECT_GE(q[i].event.t, 0.0);
        EXPECT_LT(q[i].event.t, 200'000.0);
        if (i > 0) {
            EXPECT_LT(q[i - 1].event.t, q[i].event.t);
        }
    }
}

TEST(Stream, SpreadAroundMid) {
    const Network net = us_equities_network();
    StreamSpec s = spec(4);
    s.mid_walk.step_ticks = 0;
    s.spread_ticks = 4;
    for (const QuoteUpdate& q : generate_stream(s, net.node(kCarteret))) {
        EXPECT_EQ(q.price_ticks, q.side == Side::Bid ? 9998 : 10002);
    }
}

TEST(Stream, RejectsBadSpecs) {
    const Network net = us_equities_network();
    StreamSpec s = spec(5);
    s.rate_per_s = 0.0;
    EXPECT_THROW(generate_stream(s, net.node(kCarteret)), InvalidArgument);
    s = spec(5);
    s.spread_ticks = 0;
    EXPECT_THROW(generate_stream(s, net.node(kCarteret)), InvalidArgument);
    s = spec(5);
    s.duration_us = 0.0;
    EXPECT_TRUE(generate_stream(s, net.node(kCarteret)).empty());
}

TEST(Shock, EveryExchangeRequotesAfterEachShock) {
    const Network net = us_equities_network();
    ShockSpec s;
    s.exchanges = {kMahwah, kCarteret};
    s.seed = 1;
    s.shock_rate_per_s = 100.0;
    s.duration_us = 1e6;
    const auto q = generate_shock_streams(s, net);
    std::map<ExchangeId, int> per;
    for (const auto& u : q) ++per[u.exchange];
    EXPECT_EQ(per[kMahwah], per[kCarteret]);
    EXPECT_EQ(per[kMahwah] % 2, 0);  // bid/ask pairs
    for (std::size_t i = 1; i < q.size(); ++i) EXPECT_FALSE(emission_before(q[i], q[i - 1]));
    std::vector<QuoteUpdate> copy = q;
    EXPECT_NO_THROW(validate_quotes(copy, net));
}

TEST(Fixture, TheoremOnePair) {
    const Network net = theorem1_network();
    const auto q = theorem1_fixture();
    ASSERT_EQ(q.size(), 2u);
    const QuoteUpdate& alpha = q[0];
    const QuoteUpdate& beta = q[1];
    EXPECT_EQ(alpha.event.id, theorem1::kAlpha);
    EXPECT_EQ(alpha.price_ticks, 100);
    EXPECT_EQ(alpha.event.t, 50.0);
    EXPECT_EQ(beta.price_ticks, 101);
    EXPECT_EQ(beta.event.t, 0.0);
    EXPECT_NEAR((alpha.event.x - beta.event.x).norm(), 43.0, 1e-9);
    EXPECT_EQ(net.sip_node(), theorem1::kExchangeA);
}

TEST(EventsCsv, ParsesAndOrders) {
    const Network net = us_equities_network();
    const auto q = parse_scenario_events(
        "# comment\n"
        "event_id,exchange_id,t_emit_us,side,price_ticks,size\n"
        "10,2,5.5,ask,102,300\n"
        "\n"
        "11,1,1.25,bid,100,100\n",
        net);
    ASSERT_EQ(q.size(), 2u);
    EXPECT_EQ(q[0].event.id, 11u);
    EXPECT_EQ(q[0].event.x, net.node(1).position);
    EXPECT_EQ(q[1].side, Side::Ask);
    EXPECT_EQ(q[1].size, 300);
}

TEST(EventsCsv, PositionColumnsMustMatchSite) {
    const Network net = us_equities_network();
    const Vec3 p = net.node(1).position;
    const std::string good = "event_id,exchange_id,t_emit_us,side,price_ticks,size,x_km,y_km,z_km\n1,1,0,bid,100,1," +
                             format_double(p.x) + "," + format_double(p.y) + "," + format_double(p.z) + "\n";
    EXPECT_NO_THROW(parse_scenario_events(good, net));
    const std::string bad = "event_id,exchange_id,t_emit_us,side,price_ticks,size,x_km,y_km,z_km\n1,1,0,bid,100,1,0,0,0\n";
    EXPECT_THROW(parse_scenario_events(bad, net), ConfigError);
}

TEST(EventsCsv, ErrorsCarryLineNumbers) {
    const Network net = us_equities_network();
    const std::string header = "event_id,exchange_id,t_emit_us,side,price_ticks,size\n";
    auto where = [&](const std::string& body) {
        try {
            parse_scenario_events(header + body, net, "ev.csv");
        } catch (const ConfigError& e) {
            return e.where();
        }
        return std::string("no error");
    };
    EXPECT_EQ(where("1,1,0,bid,100\n"), "ev.csv:2");
    EXPECT_EQ(where("1,1,0,bid,100,1\n2,1,x,bid,100,1\n"), "ev.csv:3");
    EXPECT_EQ(where("1,1,0,buy,100,1\n"), "ev.csv:2");
    EXPECT_EQ(where("1,9,0,bid,100,1\n"), "ev.csv:2");
    EXPECT_EQ(where("1,1,0,bid,0,1\n"), "ev.csv:2");
    EXPECT_THROW(parse_scenario_events("id,exchange\n", net), ConfigError);
}

TEST(Validate, RejectsDuplicatesAndTies) {
    const Network net = us_equities_network();
    const Vec3 p = net.node(1).position;
    std::vector<QuoteUpdate> dup{{{1, p, 0.0}, 1, Side::Bid, 100, 1}, {{1, p, 1.0}, 1, Side::Ask, 101, 1}};
    EXPECT_THROW(validate_quotes(dup, net), ConfigError);
    std::vector<QuoteUpdate> tie{{{1, p, 0.0}, 1, Side::Bid, 100, 1}, {{2, p, 0.0}, 1, Side::Ask, 101, 1}};
    EXPECT_THROW(validate_quotes(tie, net), ConfigError);
    std::vector<QuoteUpdate> ok{{{2, p, 1.0}, 1, Side::Bid, 100, 1}, {{1, p, 0.0}, 1, Side::Ask, 101, 1}};
    EXPECT_NO_THROW(validate_quotes(ok, net));
    EXPECT_EQ(ok[0].event.id, 1u);
}

TEST(EmissionOrder, TimeThenExchangeThenId) {
    QuoteUpdate a{{5, {}, 1.0}, 2, Side::Bid, 1, 1};
    QuoteUpdate b{{4, {}, 1.0}, 3, Side::Bid, 1, 1};
    EXPECT_TRUE(emission_before(a, b));
    b.exchange = 2;
    EXPECT_TRUE(emission_before(b, a));
    b.event.t = 2.0;
    EXPECT_TRUE(emission_before(a, b));
}
