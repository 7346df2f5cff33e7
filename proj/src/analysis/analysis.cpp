#include "esim/analysis.hpp"

#include <algorithm>
#include <map>

#include "esim/error.hpp"

namespace esim {

namespace {

NbboState state_of(const NbboSample* s) {
    return s ? NbboState{s->best_bid, s->best_ask} : NbboState{};
}

std::vector<EventId> update_order(std::span<const ArrivalRecord> arrivals, const Convention& c) {
    const std::vector<double> times = convention_times(arrivals, c);
    std::vector<std::size_t> idx(arrivals.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (times[a] != times[b]) return times[a] < times[b];
        return emission_before(arrivals[a].quote, arrivals[b].quote);
    });
    std::vector<EventId> out;
    for (std::size_t i : idx) out.push_back(arrivals[i].quote.event.id);
    return out;
}

}  // namespace

DivergenceReport nbbo_divergence(const NbboSeries& s1, const NbboSeries& s2, double origin_us,
                                 double horizon_us) {
    if (!(horizon_us >= origin_us)) throw InvalidArgument("divergence horizon precedes its origin");
    DivergenceReport report;
    report.origin_us = origin_us;
    report.total_time_us = horizon_us - origin_us;

    std::vector<double> cuts{origin_us, horizon_us};
    for (const NbboSeries* s : {&s1, &s2}) {
        for (const NbboSample& sample : s->samples) {
            if (sample.t_us > origin_us && sample.t_us < horizon_us) cuts.push_back(sample.t_us);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double covered = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const NbboSample* a = s1.at(cuts[k]);
        const NbboSample* b = s2.at(cuts[k]);
        if (!a || !b) continue;  // one side has not published yet
        const NbboState sa = state_of(a);
        const NbboState sb = state_of(b);
        if (sa == sb) continue;
        auto& w = report.windows;
        if (!w.empty() && w.back().end_us == cuts[k] && w.back().first == sa && w.back().second == sb) {
            w.back().end_us = cuts[k + 1];
        } else {
            w.push_back({cuts[k], cuts[k + 1], sa, sb});
        }
        covered += cuts[k + 1] - cuts[k];
    }
    report.disagreement_fraction = report.total_time_us > 0.0 ? covered / report.total_time_us : 0.0;
    return report;
}

Theorem1Witness theorem1_witness(const QuoteUpdate& alpha, const QuoteUpdate& beta,
                                 const Network& network, double margin) {
    Theorem1Witness w;
    w.boost = flip_boost(alpha.event, beta.event, margin);  // throws NotSpacelike
    w.boost_origin.x = (alpha.event.x + beta.event.x) * 0.5;
    w.boost_origin.t = 0.5 * (alpha.event.t + beta.event.t);

    const std::vector<QuoteUpdate> pair{alpha, beta};
    const std::vector<ArrivalRecord> arrivals = deliver(pair, network);
    const Convention lab = LabFrameEmission{};
    const Convention boosted = BoostedFrameEmission{w.boost, w.boost_origin};
    w.frame_s = consolidate(arrivals, lab);
    w.frame_sprime = consolidate(arrivals, boosted);
    w.order_s = update_order(arrivals, lab);
    w.order_sprime = update_order(arrivals, boosted);

    double lo = INFINITY;
    double hi = -INFINITY;
    for (const NbboSeries* s : {&w.frame_s, &w.frame_sprime}) {
        for (const NbboSample& sample : s->samples) {
            lo = std::min(lo, sample.t_us);
            hi = std::max(hi, sample.t_us);
        }
    }
    w.divergence = nbbo_divergence(w.frame_s, w.frame_sprime, lo, hi + std::max(1.0, hi - lo));
    return w;
}

// ---- races --------------------------------------------------------------------

bool FeedModel::valid() const {
    return delta_direct_us >= 0.0 && delta_sip_us >= 0.0 && reaction_us >= 0.0 &&
           delta_direct_us < delta_sip_us;
}

std::string_view to_string(Winner w) { return w == Winner::Fast ? "fast" : "slow"; }

std::vector<RaceEvent> detect_races(std::span<const ArrivalRecord> arrivals, const FeedModel& feeds) {
    std::vector<RaceEvent> races;
    const double window = feeds.race_window_us();
    if (!feeds.valid() || !(window > 0.0)) return races;

    std::vector<const QuoteUpdate*> quotes;
    quotes.reserve(arrivals.size());
    for (const ArrivalRecord& r : arrivals) quotes.push_back(&r.quote);
    std::sort(quotes.begin(), quotes.end(),
              [](const QuoteUpdate* a, const QuoteUpdate* b) { return emission_before(*a, *b); });

    struct Live {
        const QuoteUpdate* bid = nullptr;
        const QuoteUpdate* ask = nullptr;
    };
    std::map<ExchangeId, Live> live;
    for (const QuoteUpdate* q : quotes) {
        for (const auto& [exchange, resting] : live) {
            if (exchange == q->exchange) continue;
            const QuoteUpdate* stale = nullptr;
            Ticks improvement = 0;
            if (q->side == Side::Bid && resting.ask && q->price_ticks > resting.ask->price_ticks) {
                stale = resting.ask;
                improvement = q->price_ticks - resting.ask->price_ticks;
            } else if (q->side == Side::Ask && resting.bid && q->price_ticks < resting.bid->price_ticks) {
                stale = resting.bid;
                improvement = resting.bid->price_ticks - q->price_ticks;
            }
            if (!stale) continue;
            RaceEvent race;
            race.trigger = *q;
            race.stale_quote = *stale;
            race.window_us = window;
            race.improvement_ticks = improvement;
            race.profit = improvement * std::min(q->size, stale->size);
            const double extra = feeds.reaction_jitter ? feeds.reaction_jitter->draw(races.size()) : 0.0;
            race.winner = window - extra > 0.0 ? Winner::Fast : Winner::Slow;
            races.push_back(race);
        }
        Live& mine = live[q->exchange];
        (q->side == Side::Bid ? mine.bid : mine.ask) = q;
    }
    return races;
}

RaceSummary race_summary(std::span<const RaceEvent> races, double duration_us, int n_securities) {
    if (!(duration_us > 0.0)) throw InvalidArgument("race summary needs a positive duration");
    if (n_securities <= 0) throw InvalidArgument("race summary needs at least one security");
    RaceSummary s;
    s.races = races.size();
    if (races.empty()) return s;
    std::size_t fast = 0;
    for (const RaceEvent& r : races) {
        if (r.winner == Winner::Fast) {
            ++fast;
            s.total_profit += r.profit;
        }
    }
    const double minutes = duration_us / 60e6;
    s.races_per_minute_per_security = static_cast<double>(races.size()) / minutes / n_securities;
    s.fast_win_fraction = static_cast<double>(fast) / static_cast<double>(races.size());
    return s;
}

void write_races_csv(std::ostream& out, std::span<const RaceEvent> races) {
    out << "trigger_id,trigger_exchange,trigger_side,trigger_price,stale_id,stale_exchange,"
           "stale_price,window_us,winner,improvement_ticks,profit\n";
    for (const RaceEvent& r : races) {
        out << r.trigger.event.id << ',' << r.trigger.exchange << ',' << to_string(r.trigger.side) << ','
            << r.trigger.price_ticks << ',' << r.stale_quote.event.id << ',' << r.stale_quote.exchange
            << ',' << r.stale_quote.price_ticks << ',' << format_double(r.window_us) << ','
            << to_string(r.winner) << ',' << r.improvement_ticks << ',' << r.profit << '\n';
    }
}

}  // namespace esim
