#include "esim/consolidation.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>

#include "esim/error.hpp"
#include "esim/kernels.hpp"

namespace esim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool arrival_before(const ArrivalRecord& a, const ArrivalRecord& b) {
    if (a.arrival_us != b.arrival_us) return a.arrival_us < b.arrival_us;
    if (a.quote.exchange != b.quote.exchange) return a.quote.exchange < b.quote.exchange;
    return a.quote.event.id < b.quote.event.id;
}

// Higher bid wins; equal prices go to the lower exchange id.
bool better_bid(const BestQuote& a, const BestQuote& b) {
    return a.price_ticks != b.price_ticks ? a.price_ticks > b.price_ticks : a.exchange < b.exchange;
}

bool better_ask(const BestQuote& a, const BestQuote& b) {
    return a.price_ticks != b.price_ticks ? a.price_ticks < b.price_ticks : a.exchange < b.exchange;
}

struct LiveQuotes {
    const QuoteUpdate* bid = nullptr;
    const QuoteUpdate* ask = nullptr;
};

}  // namespace

// ---- delivery -----------------------------------------------------------------

std::vector<ArrivalRecord> deliver(std::span<const QuoteUpdate> quotes, const Network& network) {
    std::vector<ArrivalRecord> out;
    out.reserve(quotes.size());
    std::map<const Link*, std::uint64_t> link_draws;
    std::map<ExchangeId, std::uint64_t> default_draws;
    const auto sip_node = network.sip_node();

    for (const QuoteUpdate& q : quotes) {
        double delay = 0.0;
        if (sip_node && *sip_node == q.exchange) {
            delay = 0.0;
        } else if (const Link* link = network.link_to_sip(q.exchange)) {
            delay = propagation_delay(*link, network, link_draws[link]++);
        } else if (auto implicit = network.default_link_to_sip(q.exchange)) {
            delay = propagation_delay(*implicit, network, default_draws[q.exchange]++);
        } else {
            throw ConfigError("exchange " + std::to_string(q.exchange),
                              "no link to the SIP and no default-link policy");
        }
        const double floor = light_time((q.event.x - network.sip_position()).norm());
        if (delay < floor * (1.0 - 1e-12)) {
            throw CausalityViolation("delivery of event " + std::to_string(q.event.id) +
                                     " would outrun light to the SIP");
        }
        out.push_back({q, q.event.t + delay, delay});
    }
    std::sort(out.begin(), out.end(), arrival_before);
    return out;
}

// ---- conventions --------------------------------------------------------------

std::string describe(const Convention& c) {
    return std::visit(
        Overloaded{
            [](const ArrivalOrder&) { return std::string("arrival order at the SIP"); },
            [](const LabFrameEmission&) { return std::string("lab-frame emission time"); },
            [](const BoostedFrameEmission& b) {
                const Vec3& v = b.boost.velocity();
                return "emission time in frame boosted by v = (" + format_double(v.x) + ", " +
                       format_double(v.y) + ", " + format_double(v.z) + ") km/us (" +
                       format_double(b.boost.beta()) + "c)";
            },
            [](const UncertaintyInterval& u) {
                return "commit-wait on emission +/- " + format_double(u.epsilon_us) + " us";
            },
        },
        c);
}

double convention_time(const Convention& c, const ArrivalRecord& r) {
    return std::visit(
        Overloaded{
            [&](const ArrivalOrder&) { return r.arrival_us; },
            [&](const LabFrameEmission&) { return r.quote.event.t; },
            [&](const BoostedFrameEmission& b) {
                SpacetimeEvent local = r.quote.event;
                local.x = local.x - b.origin.x;
                local.t -= b.origin.t;
                return boost_event(b.boost, local).t + b.origin.t;
            },
            [&](const UncertaintyInterval& u) { return r.quote.event.t + u.epsilon_us; },
        },
        c);
}

std::vector<double> convention_times(std::span<const ArrivalRecord> arrivals,
                                     const Convention& convention) {
    std::vector<double> times(arrivals.size());
    if (const auto* b = std::get_if<BoostedFrameEmission>(&convention)) {
        kernels::EventColumns cols(arrivals.size());
        for (std::size_t i = 0; i < arrivals.size(); ++i) {
            const SpacetimeEvent& e = arrivals[i].quote.event;
            cols.t[i] = e.t - b->origin.t;
            cols.x[i] = e.x.x - b->origin.x.x;
            cols.y[i] = e.x.y - b->origin.x.y;
            cols.z[i] = e.x.z - b->origin.x.z;
        }
        kernels::boosted_times(b->boost, cols.view(), times);
        for (double& t : times) t += b->origin.t;
        return times;
    }
    if (const auto* u = std::get_if<UncertaintyInterval>(&convention); u && !(u->epsilon_us >= 0.0)) {
        throw InvalidArgument("uncertainty epsilon must be >= 0");
    }
    for (std::size_t i = 0; i < arrivals.size(); ++i) times[i] = convention_time(convention, arrivals[i]);
    return times;
}

// ---- consolidation ------------------------------------------------------------

const NbboSample* NbboSeries::at(double t_us) const {
    auto it = std::upper_bound(samples.begin(), samples.end(), t_us,
                               [](double t, const NbboSample& s) { return t < s.t_us; });
    return it == samples.begin() ? nullptr : &*std::prev(it);
}

NbboSeries consolidate(std::span<const ArrivalRecord> arrivals, const Convention& convention) {
    const std::vector<double> times = convention_times(arrivals, convention);
    std::vector<std::size_t> order(arrivals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (times[a] != times[b]) return times[a] < times[b];
        const QuoteUpdate& qa = arrivals[a].quote;
        const QuoteUpdate& qb = arrivals[b].quote;
        if (qa.exchange != qb.exchange) return qa.exchange < qb.exchange;
        return qa.event.id < qb.event.id;
    });

    std::map<ExchangeId, LiveQuotes> live;
    NbboSeries series;
    for (std::size_t i = 0; i < order.size();) {
        const double t = times[order[i]];
        for (; i < order.size() && times[order[i]] == t; ++i) {
            const QuoteUpdate& q = arrivals[order[i]].quote;
            const QuoteUpdate*& slot = q.side == Side::Bid ? live[q.exchange].bid : live[q.exchange].ask;
            // Late arrivals of older quotes never displace a newer one.
            if (!slot || emission_before(*slot, q)) slot = &q;
        }
        NbboSample s;
        s.t_us = t;
        for (const auto& [exchange, quotes] : live) {
            if (quotes.bid) {
                const BestQuote c{quotes.bid->price_ticks, exchange};
                if (!s.best_bid || better_bid(c, *s.best_bid)) s.best_bid = c;
            }
            if (quotes.ask) {
                const BestQuote c{quotes.ask->price_ticks, exchange};
                if (!s.best_ask || better_ask(c, *s.best_ask)) s.best_ask = c;
            }
        }
        s.crossed = s.best_bid && s.best_ask && s.best_bid->price_ticks > s.best_ask->price_ticks;
        if (series.samples.empty() || series.samples.back().best_bid != s.best_bid ||
            series.samples.back().best_ask != s.best_ask) {
            series.samples.push_back(s);
        }
    }
    return series;
}

// ---- interval consolidation ---------------------------------------------------

const IntervalNbboSample* IntervalNbbo::at(double t_us) const {
    auto it = std::upper_bound(samples.begin(), samples.end(), t_us,
                               [](double t, const IntervalNbboSample& s) { return t < s.t_us; });
    return it == samples.begin() ? nullptr : &*std::prev(it);
}

namespace {

// One (exchange, side) program-ordered quote sequence.
struct SideStream {
    ExchangeId exchange = 0;
    std::vector<const QuoteUpdate*> quotes;  // emission order
    std::size_t definite = 0;  // quotes certainly emitted by now
    std::size_t possible = 0;  // quotes possibly emitted by now
};

struct Candidates {
    bool may_be_none = false;
    std::vector<Ticks> prices;  // distinct
};

Candidates candidates_of(const SideStream& s) {
    Candidates c;
    c.may_be_none = s.definite == 0;
    const std::size_t first = s.definite == 0 ? 0 : s.definite - 1;
    for (std::size_t k = first; k < s.possible; ++k) c.prices.push_back(s.quotes[k]->price_ticks);
    std::sort(c.prices.begin(), c.prices.end());
    c.prices.erase(std::unique(c.prices.begin(), c.prices.end()), c.prices.end());
    return c;
}

// Possible winners for one side. `better` orders BestQuote by preference.
template <class Better>
std::vector<BestQuote> possible_best(const std::vector<SideStream>& streams,
                                     const std::vector<Candidates>& cands, Better better,
                                     bool& may_be_empty) {
    may_be_empty = true;
    for (const Candidates& c : cands) may_be_empty = may_be_empty && c.may_be_none;

    std::vector<BestQuote> out;
    for (std::size_t e = 0; e < streams.size(); ++e) {
        for (Ticks p : cands[e].prices) {
            const BestQuote mine{p, streams[e].exchange};
            bool feasible = true;
            for (std::size_t f = 0; f < streams.size() && feasible; ++f) {
                if (f == e || cands[f].may_be_none) continue;
                // F's least competitive option must lose to mine.
                const BestQuote weakest_low{cands[f].prices.front(), streams[f].exchange};
                const BestQuote weakest_high{cands[f].prices.back(), streams[f].exchange};
                const BestQuote& weakest = better(weakest_low, weakest_high) ? weakest_high : weakest_low;
                feasible = better(mine, weakest);
            }
            if (feasible) out.push_back(mine);
        }
    }
    std::sort(out.begin(), out.end(), [](const BestQuote& a, const BestQuote& b) {
        return a.price_ticks != b.price_ticks ? a.price_ticks < b.price_ticks : a.exchange < b.exchange;
    });
    return out;
}

}  // namespace

IntervalNbbo consolidate_interval(std::span<const ArrivalRecord> arrivals, double epsilon_clock_us) {
    if (!(epsilon_clock_us >= 0.0)) throw InvalidArgument("uncertainty epsilon must be >= 0");
    const double eps = epsilon_clock_us;

    std::map<ExchangeId, SideStream> bid_map, ask_map;
    std::vector<double> breakpoints;
    for (const ArrivalRecord& r : arrivals) {
        const QuoteUpdate& q = r.quote;
        auto& stream = (q.side == Side::Bid ? bid_map : ask_map)[q.exchange];
        stream.exchange = q.exchange;
        stream.quotes.push_back(&q);
        breakpoints.push_back(q.event.t - eps);
        breakpoints.push_back(q.event.t + eps);
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    auto flatten = [](std::map<ExchangeId, SideStream>& m) {
        std::vector<SideStream> v;
        for (auto& [id, s] : m) {
            std::sort(s.quotes.begin(), s.quotes.end(),
                      [](const QuoteUpdate* a, const QuoteUpdate* b) { return emission_before(*a, *b); });
            v.push_back(std::move(s));
        }
        return v;
    };
    std::vector<SideStream> bids = flatten(bid_map);
    std::vector<SideStream> asks = flatten(ask_map);

    auto advance = [eps](std::vector<SideStream>& streams, double tau) {
        std::vector<Candidates> out;
        out.reserve(streams.size());
        for (SideStream& s : streams) {
            while (s.possible < s.quotes.size() && s.quotes[s.possible]->event.t - eps <= tau) ++s.possible;
            while (s.definite < s.quotes.size() && s.quotes[s.definite]->event.t + eps <= tau) ++s.definite;
            out.push_back(candidates_of(s));
        }
        return out;
    };

    IntervalNbbo result;
    for (double tau : breakpoints) {
        IntervalNbboSample s;
        s.t_us = tau;
        const auto bid_cands = advance(bids, tau);
        const auto ask_cands = advance(asks, tau);
        s.possible_best_bids = possible_best(bids, bid_cands, better_bid, s.bid_may_be_empty);
        s.possible_best_asks = possible_best(asks, ask_cands, better_ask, s.ask_may_be_empty);
        if (!result.samples.empty()) {
            const auto& prev = result.samples.back();
            if (prev.possible_best_bids == s.possible_best_bids &&
                prev.possible_best_asks == s.possible_best_asks &&
                prev.bid_may_be_empty == s.bid_may_be_empty && prev.ask_may_be_empty == s.ask_may_be_empty) {
                continue;
            }
        }
        result.samples.push_back(std::move(s));
    }
    return result;
}

// ---- ES conditions ------------------------------------------------------------

EsReport es_conditions(std::span<const QuoteUpdate> quotes, const Convention& convention,
                       double epsilon_km2) {
    EsReport report;
    report.es2 = true;
    report.es2_convention = describe(convention);

    std::vector<const QuoteUpdate*> sorted;
    sorted.reserve(quotes.size());
    for (const QuoteUpdate& q : quotes) sorted.push_back(&q);
    std::sort(sorted.begin(), sorted.end(),
              [](const QuoteUpdate* a, const QuoteUpdate* b) { return emission_before(*a, *b); });

    // Pairs further apart in time than the widest separation cannot be spacelike.
    double max_dist = 0.0;
    std::map<ExchangeId, Vec3> sites;
    for (const QuoteUpdate* q : sorted) sites.emplace(q->exchange, q->event.x);
    for (const auto& [ia, pa] : sites) {
        for (const auto& [ib, pb] : sites) max_dist = std::max(max_dist, (pa - pb).norm());
    }
    const double horizon = light_time(max_dist);

    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            if (sorted[j]->event.t - sorted[i]->event.t > horizon) break;
            if (sorted[i]->exchange == sorted[j]->exchange) continue;
            if (classify(sorted[i]->event, sorted[j]->event, epsilon_km2) == IntervalClass::Spacelike) {
                report.es1 = true;
                report.es1_witness = std::pair{sorted[i]->event.id, sorted[j]->event.id};
                return report;
            }
        }
    }
    return report;
}

// ---- writers ------------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_series_csv(std::ostream& out, const NbboSeries& series) {
    out << "t_us,bid_ticks,bid_venue,ask_ticks,ask_venue,crossed\n";
    for (const NbboSample& s : series.samples) {
        out << format_double(s.t_us) << ',';
        if (s.best_bid) {
            out << s.best_bid->price_ticks << ',' << s.best_bid->exchange << ',';
        } else {
            out << "null,null,";
        }
        if (s.best_ask) {
            out << s.best_ask->price_ticks << ',' << s.best_ask->exchange << ',';
        } else {
            out << "null,null,";
        }
        out << (s.crossed ? "true" : "false") << '\n';
    }
}

void write_arrivals_csv(std::ostream& out, std::span<const ArrivalRecord> arrivals) {
    out << "event_id,exchange_id,side,price_ticks,size,t_emit_us,arrival_us,delay_us\n";
    for (const ArrivalRecord& r : arrivals) {
        out << r.quote.event.id << ',' << r.quote.exchange << ',' << to_string(r.quote.side) << ','
            << r.quote.price_ticks << ',' << r.quote.size << ',' << format_double(r.quote.event.t) << ','
            << format_double(r.arrival_us) << ',' << format_double(r.delay_us) << '\n';
    }
}

void write_interval_csv(std::ostream& out, const IntervalNbbo& nbbo) {
    auto set = [&](const std::vector<BestQuote>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            out << (i ? ";" : "") << v[i].price_ticks << '@' << v[i].exchange;
        }
    };
    out << "t_us,possible_bids,possible_asks,bid_may_be_empty,ask_may_be_empty\n";
    for (const IntervalNbboSample& s : nbbo.samples) {
        out << format_double(s.t_us) << ',';
        set(s.possible_best_bids);
        out << ',';
        set(s.possible_best_asks);
        out << ',' << (s.bid_may_be_empty ? "true" : "false") << ','
            << (s.ask_may_be_empty ? "true" : "false") << '\n';
    }
}

}  // namespace esim
