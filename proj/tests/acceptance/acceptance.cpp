// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "esim/analysis.hpp"
#include "esim/causal.hpp"
#include "esim/commands.hpp"
#include "esim/consolidation.hpp"
#include "esim/error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace esim;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = ESIM_SCENARIO_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("esim_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, sep)) out.push_back(cell);
    return out;
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * want; }

// ---- AC1 ---------------------------------------------------------------------

Outcome latency_table() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    CommandOptions opt;
    opt.config_path = kScenarios / "us_equities.scenario";
    opt.out_dir = scratch("ac1");
    std::ostringstream out, err;
    if (cmd_report(opt, out, err) != kExitOk) {
        o.fail("report failed: " + err.str());
        return o;
    }
    const double elapsed = seconds_since(t0);

    struct Row {
        double d, light, fiber;
    };
    const std::vector<Row> want{{43, 143, 215}, {34, 113, 170}, {27, 90, 135}, {1180, 3940, 5900}};
    std::istringstream table(slurp(*opt.out_dir / "latency_table.csv"));
    std::string line;
    std::getline(table, line);
    std::vector<Row> got;
    while (std::getline(table, line)) {
        const auto cells = split(line, ',');
        if (cells.size() != 4) continue;
        got.push_back({std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])});
    }
    for (const Row& w : want) {
        bool found = false;
        for (const Row& g : got) {
            if (g.d == w.d && within(g.light, w.light, 0.01) && within(g.fiber, w.fiber, 0.01)) found = true;
        }
        if (!found) o.fail("no row within 1% of " + std::to_string(static_cast<int>(w.d)) + " km");
    }
    if (elapsed >= 1.0) o.fail("took " + std::to_string(elapsed) + " s");
    if (o.pass) o.detail = "4/4 rows within 1%, " + format_double(std::round(elapsed * 1e3)) + " ms";
    return o;
}

// ---- AC2 ---------------------------------------------------------------------

Outcome witness() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const Network net = theorem1_network();
    const auto quotes = theorem1_fixture();
    const auto arrivals = deliver(quotes, net);
    const NbboSeries arrival = consolidate(arrivals, ArrivalOrder{});
    const NbboSeries lab = consolidate(arrivals, LabFrameEmission{});

    // Hand replay: alpha is local to the SIP (t = 50); beta crosses 43 km of n = 1.5 fiber.
    const double alpha_at_sip = 50.0;
    const double beta_at_sip = 0.0 + 43.0 * 1.5 / oracle::c;
    const DivergenceReport d = nbbo_divergence(arrival, lab, 1000.0);
    if (d.windows.size() != 1) {
        o.fail(std::to_string(d.windows.size()) + " disagreement windows");
        return o;
    }
    const DisagreementWindow& w = d.windows[0];
    if (w.start_us != alpha_at_sip) o.fail("window starts at " + format_double(w.start_us));
    if (std::abs(w.end_us - beta_at_sip) > 1e-9 || std::lround(w.end_us) != 215) {
        o.fail("window ends at " + format_double(w.end_us));
    }
    // Replay both conventions from scratch inside and outside the window.
    std::vector<double> at_sip, emitted;
    for (const ArrivalRecord& r : arrivals) {
        at_sip.push_back(r.arrival_us);
        emitted.push_back(r.quote.event.t);
    }
    for (double t : {0.0, 49.9, 50.0, 100.0, 215.0, 215.2, 500.0}) {
        const oracle::State a = oracle::nbbo_at(arrivals, at_sip, t);
        const oracle::State l = oracle::nbbo_at(arrivals, emitted, t);
        const NbboSample* sa = arrival.at(t);
        const NbboSample* sl = lab.at(t);
        const oracle::State ga = sa ? oracle::State{sa->best_bid, sa->best_ask} : oracle::State{};
        const oracle::State gl = sl ? oracle::State{sl->best_bid, sl->best_ask} : oracle::State{};
        if (a != ga || l != gl) o.fail("replay mismatch at t = " + format_double(t));
        const bool inside = t >= alpha_at_sip && t < beta_at_sip;
        // Instants before a series first publishes are not compared.
        const bool both = sa && sl;
        if (inside != (both && a != l)) o.fail("replay disagreement at t = " + format_double(t));
    }

    const Theorem1Witness tw = theorem1_witness(quotes[0], quotes[1], net);
    const FrameOrder before = ordering_in_frame(quotes[0].event, quotes[1].event, LorentzBoost{});
    const FrameOrder after = ordering_in_frame(quotes[0].event, quotes[1].event, tw.boost);
    if (!(tw.boost.speed() < oracle::c)) o.fail("boost not subluminal");
    if (after == before || after == FrameOrder::Indistinguishable) o.fail("boost does not reverse the pair");
    if (tw.order_s.size() != 2 || tw.order_sprime.size() != 2 || tw.order_s[0] != tw.order_sprime[1]) {
        o.fail("witness update orders do not reverse");
    }
    if (tw.divergence.windows.empty()) o.fail("witness series never disagree");
    const double elapsed = seconds_since(t0);
    if (elapsed >= 1.0) o.fail("took " + std::to_string(elapsed) + " s");
    if (o.pass) {
        o.detail = "window [" + format_double(w.start_us) + ", " + format_double(w.end_us) + ") us, |v| = " +
                   format_double(tw.boost.beta()) + "c";
    }
    return o;
}

// ---- AC3 ---------------------------------------------------------------------

Outcome flips() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    gen::Rng rng(1001);
    int spacelike = 0;
    while (spacelike < 1000) {
        auto [a, b] = gen::spacelike_pair(rng);
        if (classify(a, b) != IntervalClass::Spacelike) continue;
        ++spacelike;
        try {
            const LorentzBoost boost = flip_boost(a, b);
            const FrameOrder lab = ordering_in_frame(a, b, LorentzBoost{});
            const FrameOrder flipped = ordering_in_frame(a, b, boost);
            if (!(boost.speed() < oracle::c)) o.fail("superluminal flip boost");
            if (flipped == lab || flipped == FrameOrder::Indistinguishable) o.fail("flip did not reverse a pair");
        } catch (const Error& e) {
            o.fail(std::string("flip_boost threw: ") + e.what());
        }
    }
    int timelike = 0;
    long boosts = 0;
    while (timelike < 1000) {
        auto [a, b] = gen::timelike_pair(rng);
        if (classify(a, b) != IntervalClass::Timelike) continue;
        ++timelike;
        const FrameOrder lab = ordering_in_frame(a, b, LorentzBoost{});
        for (int k = 0; k < 100; ++k, ++boosts) {
            if (ordering_in_frame(a, b, LorentzBoost(gen::velocity(rng, 0.99))) != lab) {
                o.fail("a boost changed a timelike order");
            }
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 10.0) o.fail("took " + std::to_string(elapsed) + " s");
    if (o.pass) {
        o.detail = std::to_string(spacelike) + " spacelike flips, " + std::to_string(boosts) + " timelike boosts";
    }
    return o;
}

// ---- AC4 ---------------------------------------------------------------------

Outcome interval_invariance() {
    Outcome o;
    gen::Rng rng(1002);
    int checked = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        auto [a, b] = gen::any_pair(rng);
        for (int k = 0; k < 10; ++k) {
            const LorentzBoost boost(gen::velocity(rng, 0.99));
            const double before = interval_squared(a, b);
            const double after = interval_squared(boost_event(boost, a), boost_event(boost, b));
            const double dt = b.t - a.t;
            const double scale = oracle::c * oracle::c * dt * dt + (b.x - a.x).norm2();
            const double rel = scale > 0.0 ? std::abs(after - before) / scale : std::abs(after - before);
            worst = std::max(worst, rel);
            if (rel > 1e-9) o.fail("relative change " + std::to_string(rel));
            ++checked;
        }
    }
    if (o.pass) {
        std::ostringstream s;
        s << checked << " pair-boosts, worst relative change " << worst;
        o.detail = s.str();
    }
    return o;
}

// ---- AC5 ---------------------------------------------------------------------

Outcome causal_isomorphism() {
    Outcome o;
    gen::Rng rng(1003);
    long related = 0;
    long concurrent_pairs = 0;
    for (int scenario = 0; scenario < 100; ++scenario) {
        const Network net = gen::network(rng, 3 + scenario % 4);
        const auto quotes = gen::quotes(rng, net, 60 + scenario % 50);
        const auto arrivals = deliver(quotes, net);
        const CausalGraph g = build_causal_graph(quotes, arrivals, net.sip_position());
        const auto& v = g.vertices();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto reach = reachable_from(g, i);
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (reach[j]) {
                    ++related;
                    if (classify(v[i].event, v[j].event) == IntervalClass::Spacelike) {
                        o.fail("happened-before pair " + to_string(v[i].ref) + " -> " + to_string(v[j].ref) +
                               " is spacelike");
                    }
                }
                // Emissions at distinct exchanges never communicate directly.
                const bool emissions = v[i].ref.kind == EventKind::Emission && v[j].ref.kind == EventKind::Emission;
                if (i < j && emissions && v[i].process != v[j].process &&
                    classify(v[i].event, v[j].event) == IntervalClass::Spacelike) {
                    ++concurrent_pairs;
                    if (!concurrent(g, v[i].ref, v[j].ref)) o.fail("spacelike emissions are ordered");
                }
            }
        }
        std::vector<LorentzBoost> boosts;
        for (int k = 0; k < 100; ++k) boosts.emplace_back(gen::velocity(rng, 0.99));
        const auto report = causal_consistency_check(g, boosts);
        if (!report.ok()) o.fail(std::to_string(report.violations.size()) + " boosted order violations");
    }
    if (o.pass) {
        o.detail = "100 scenarios, " + std::to_string(related) + " related pairs, " +
                   std::to_string(concurrent_pairs) + " spacelike concurrent pairs";
    }
    return o;
}

// ---- AC6 ---------------------------------------------------------------------

Outcome consolidation_oracle() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    gen::Rng rng(1004);
    long checks = 0;
    for (std::size_t n : {100u, 1000u, 10'000u}) {
        const Network net = gen::network(rng, 6);
        const auto arrivals = deliver(gen::quotes(rng, net, n, 10.0 * static_cast<double>(n)), net);
        const std::vector<Convention> conventions{
            ArrivalOrder{}, LabFrameEmission{}, BoostedFrameEmission{LorentzBoost(gen::velocity(rng, 0.9)), {}},
            BoostedFrameEmission{LorentzBoost(gen::velocity(rng, 0.5)), {7, net.node(1).position, 100.0}},
            UncertaintyInterval{25.0}};
        for (const Convention& c : conventions) {
            const NbboSeries series = consolidate(arrivals, c);
            const auto times = convention_times(arrivals, c);
            for (double t : times) {
                const NbboSample* s = series.at(t);
                const oracle::State got = s ? oracle::State{s->best_bid, s->best_ask} : oracle::State{};
                if (got != oracle::nbbo_at(arrivals, times, t)) {
                    o.fail(describe(c) + " differs at t = " + format_double(t) + " (n = " + std::to_string(n) + ")");
                }
                ++checks;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 30.0) o.fail("took " + std::to_string(elapsed) + " s");
    if (o.pass) {
        o.detail = std::to_string(checks) + " event checks over 5 conventions, " +
                   format_double(std::round(elapsed * 10) / 10) + " s";
    }
    return o;
}

// ---- AC7 ---------------------------------------------------------------------

Outcome race_arithmetic() {
    Outcome o;
    const FeedModel feeds{20.0, 1128.0, 0.0, std::nullopt};
    if (!(feeds.feed_ratio() > 50.0)) o.fail("feed ratio " + format_double(feeds.feed_ratio()));
    gen::Rng rng(1005);
    std::size_t total = 0;
    for (int round = 0; round < 2; ++round) {
        const Network net = gen::network(rng, 5);
        const auto arrivals = deliver(gen::quotes(rng, net, 10'000, 100'000.0), net);
        const auto races = detect_races(arrivals, feeds);
        total += races.size();
        std::vector<oracle::Race> got;
        for (const RaceEvent& r : races) {
            if (r.window_us != 1108.0) o.fail("race window " + format_double(r.window_us));
            got.push_back({r.trigger.event.id, r.stale_quote.event.id, r.improvement_ticks, r.profit});
        }
        if (got != oracle::races(arrivals)) o.fail("races differ from the brute-force oracle");
    }
    if (total == 0) o.fail("no races detected");
    if (o.pass) {
        o.detail = std::to_string(total) + " races, window 1108 us, ratio " + format_double(feeds.feed_ratio()) + ":1";
    }
    return o;
}

// ---- AC8 ---------------------------------------------------------------------

std::map<std::string, std::string> run_simulate(const fs::path& config, const fs::path& out_dir, Outcome& o) {
    CommandOptions opt;
    opt.config_path = config;
    opt.out_dir = out_dir;
    std::ostringstream out, err;
    if (cmd_simulate(opt, out, err) != kExitOk) o.fail(config.filename().string() + ": " + err.str());
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(out_dir)) files[e.path().filename().string()] = slurp(e.path());
    return files;
}

Outcome determinism() {
    Outcome o;
    int scenarios = 0;
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".scenario") continue;
        const std::string stem = entry.path().stem().string();
        const auto first = run_simulate(entry.path(), scratch("ac8_" + stem + "_a"), o);
        const auto second = run_simulate(entry.path(), scratch("ac8_" + stem + "_b"), o);
        if (first.empty() || first != second) o.fail(stem + " outputs differ between runs");
        ++scenarios;
        files += first.size();
    }
    if (scenarios == 0) o.fail("no shipped scenarios found");
    if (o.pass) o.detail = std::to_string(scenarios) + " scenarios, " + std::to_string(files) + " files byte-identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC1 latency table", latency_table},
        {"AC2 frame-flip witness", witness},
        {"AC3 spacelike flips", flips},
        {"AC4 interval invariance", interval_invariance},
        {"AC5 causal isomorphism", causal_isomorphism},
        {"AC6 consolidation oracle", consolidation_oracle},
        {"AC7 race arithmetic", race_arithmetic},
        {"AC8 determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
