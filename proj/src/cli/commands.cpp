#include "esim/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "esim/analysis.hpp"
#include "esim/causal.hpp"
#include "esim/error.hpp"
#include "esim/scenario.hpp"

namespace esim {

using json = nlohmann::json;

namespace {

struct Loaded {
    ScenarioConfig config;
    std::filesystem::path base_dir;
    std::filesystem::path out_dir;
};

Loaded load(const CommandOptions& options) {
    Loaded l;
    l.config = load_config(options.config_path);
    if (options.seed) l.config.seed = *options.seed;
    l.base_dir = options.config_path.parent_path();
    l.out_dir = options.out_dir ? *options.out_dir : std::filesystem::path(l.config.outputs.dir);
    return l;
}

// Writes files into one directory and remembers their checksums.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& bytes) {
        std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError((dir_ / name).string(), "cannot write output file");
        f << bytes;
        if (!f.flush()) throw ConfigError((dir_ / name).string(), "write failed");
        checksums_[name] = sha256_hex(bytes);
    }

    const std::map<std::string, std::string>& checksums() const { return checksums_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::string> checksums_;
};

template <class F>
std::string render(F&& f) {
    std::ostringstream s;
    f(s);
    return s.str();
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UnknownId& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NotSpacelike& e) {
        err << "physics error: " << e.what() << '\n';
        return kExitPhysics;
    } catch (const CausalityViolation& e) {
        err << "physics error: " << e.what() << '\n';
        return kExitPhysics;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

std::vector<NamedConvention> select(std::vector<NamedConvention> all, const std::optional<std::string>& name) {
    if (!name) return all;
    for (NamedConvention& c : all) {
        if (c.name == *name) return {std::move(c)};
    }
    throw ConfigError("--convention", "no convention named '" + *name + "'");
}

std::string round_us(double v) { return std::to_string(std::llround(v)); }

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Loaded l = load(options);
        const ScenarioConfig& config = l.config;
        Scenario scenario = build_scenario(config, l.base_dir);
        const std::vector<NamedConvention> conventions = select(scenario.conventions, options.convention);
        const std::vector<ArrivalRecord> arrivals = deliver(scenario.quotes, scenario.network);

        OutputSet files(l.out_dir);
        files.write("arrivals.csv", render([&](std::ostream& s) { write_arrivals_csv(s, arrivals); }));

        json es = json::array();
        for (const NamedConvention& c : conventions) {
            const NbboSeries series = consolidate(arrivals, c.convention);
            files.write("nbbo_" + c.name + ".csv", render([&](std::ostream& s) { write_series_csv(s, series); }));
            const auto* u = std::get_if<UncertaintyInterval>(&c.convention);
            if (u && config.outputs.interval_nbbo) {
                const IntervalNbbo interval = consolidate_interval(arrivals, u->epsilon_us);
                files.write("interval_nbbo_" + c.name + ".csv",
                            render([&](std::ostream& s) { write_interval_csv(s, interval); }));
            }
            const EsReport r = es_conditions(scenario.quotes, c.convention, config.lightcone_epsilon_km2);
            json entry = {{"name", c.name}, {"convention", describe(c.convention)}, {"es1", r.es1},
                          {"es2", r.es2}, {"es2_convention", r.es2_convention}, {"samples", series.size()}};
            entry["es1_witness"] = r.es1_witness ? json{r.es1_witness->first, r.es1_witness->second} : json(nullptr);
            es.push_back(entry);
        }
        if (config.outputs.causal_graph) {
            const CausalGraph g = build_causal_graph(scenario.quotes, arrivals, scenario.network.sip_position());
            files.write("causal_graph.csv", render([&](std::ostream& s) { write_edge_list(s, g); }));
        }
        const json report = {{"quotes", scenario.quotes.size()}, {"conventions", es}};
        files.write("es_report.json", report.dump(2) + "\n");

        const json manifest = {{"tool", "esim"},
                               {"version", ESIM_VERSION},
                               {"seed", config.seed},
                               {"config_sha256", sha256_hex(serialize_config(config))},
                               {"outputs", files.checksums()}};
        std::ofstream(files.dir() / "manifest.json", std::ios::binary | std::ios::trunc) << manifest.dump(2) << '\n';

        out << "quotes: " << scenario.quotes.size() << '\n';
        for (const auto& [name, sum] : files.checksums()) out << "wrote " << (files.dir() / name).string() << '\n';
        out << "wrote " << (files.dir() / "manifest.json").string() << '\n';
        return kExitOk;
    });
}

int cmd_flip(const CommandOptions& options, EventId a, EventId b, std::ostream& out, std::ostream& err) {
    if (a == b) {
        err << "usage error: flip needs two distinct event ids\n";
        return kExitConfig;
    }
    return guarded(err, [&] {
        const Loaded l = load(options);
        const Scenario scenario = build_scenario(l.config, l.base_dir);
        auto find = [&](EventId id) -> const QuoteUpdate& {
            for (const QuoteUpdate& q : scenario.quotes) {
                if (q.event.id == id) return q;
            }
            throw UnknownId("event " + std::to_string(id) + " is not in the scenario");
        };
        const QuoteUpdate& qa = find(a);
        const QuoteUpdate& qb = find(b);
        const SpacetimeEvent& ea = qa.event;
        const SpacetimeEvent& eb = qb.event;

        const double s2 = interval_squared(ea, eb);
        const IntervalClass cls = classify(ea, eb, l.config.lightcone_epsilon_km2);
        const double dt = std::abs(eb.t - ea.t);
        const double light = light_time((eb.x - ea.x).norm());
        out << "event a: id " << a << ", exchange " << qa.exchange << ", t " << format_double(ea.t) << " us\n";
        out << "event b: id " << b << ", exchange " << qb.exchange << ", t " << format_double(eb.t) << " us\n";
        out << "separation: |dt| = " << format_double(dt) << " us, d/c = " << format_double(light) << " us\n";
        out << "interval_squared: " << format_double(s2) << " km^2\n";
        out << "classification: " << to_string(cls) << '\n';
        out << "lab order: " << to_string(ordering_in_frame(ea, eb, LorentzBoost{})) << '\n';
        if (cls != IntervalClass::Spacelike) {
            err << "physics error: the events are " << to_string(cls) << " (|dt| = " << format_double(dt)
                << " us, d/c = " << format_double(light)
                << " us); a frame reversing their order exists only for spacelike pairs, |dt| < d/c\n";
            return kExitPhysics;
        }
        const LorentzBoost boost = flip_boost(ea, eb);
        const Vec3& v = boost.velocity();
        // Boost about the pair's midpoint, as the flip_events conventions do.
        SpacetimeEvent mid;
        mid.x = (ea.x + eb.x) * 0.5;
        mid.t = 0.5 * (ea.t + eb.t);
        auto about_mid = [&](const SpacetimeEvent& e) {
            const SpacetimeEvent rel{e.id, e.x - mid.x, e.t - mid.t};
            return boost_event(boost, rel).t + mid.t;
        };
        const double ta = about_mid(ea);
        const double tb = about_mid(eb);
        out << "flip boost: v = (" << format_double(v.x) << ", " << format_double(v.y) << ", "
            << format_double(v.z) << ") km/us, |v| = " << format_double(boost.beta())
            << "c, gamma = " << format_double(boost.gamma()) << '\n';
        out << "boosted times (about the midpoint, t = " << format_double(mid.t) << " us): t'a = " << format_double(ta)
            << " us, t'b = " << format_double(tb) << " us\n";
        out << "boosted order: " << to_string(ordering_in_frame(ea, eb, boost)) << '\n';
        return kExitOk;
    });
}

int cmd_report(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Loaded l = load(options);
        const Network network = build_network(l.config.network, l.config.seed);
        OutputSet files(l.out_dir);

        std::ostringstream table;
        table << "pair,distance_km,light_us,medium_us\n";
        double longest = 0.0;
        for (const Link& link : network.links()) {
            const double d = effective_distance(link, network);
            longest = std::max(longest, d);
            table << network.node(link.from).name << "–" << network.node(link.to).name << ','
                  << format_double(d) << ',' << round_us(light_time(d)) << ','
                  << round_us(medium_time(d, link.medium.refractive_index)) << '\n';
        }
        files.write("latency_table.csv", table.str());
        out << table.str();

        const FeedModel feeds = l.config.feeds.value_or(FeedModel{});
        const double n = network.options().default_link ? network.options().default_link->refractive_index : 1.5;
        const int top = std::max(1300, static_cast<int>(std::ceil(longest / 100.0)) * 100);
        std::ostringstream scales;
        scales << "distance_km,light_us,fiber_us,sip_us,direct_us\n";
        for (int d = 0; d <= top; d += 10) {
            scales << d << ',' << format_double(light_time(d)) << ',' << format_double(medium_time(d, n)) << ','
                   << format_double(feeds.delta_sip_us) << ',' << format_double(feeds.delta_direct_us) << '\n';
        }
        files.write("timescales.csv", scales.str());

        std::ostringstream nodes;
        nodes << "id,name,lat,lon,alt_m,x_km,y_km,z_km,clock_rate\n";
        for (const ExchangeNode& node : network.nodes()) {
            nodes << node.id << ',' << node.name << ',' << format_double(node.latitude_deg) << ','
                  << format_double(node.longitude_deg) << ',' << format_double(node.altitude_m) << ','
                  << format_double(node.position.x) << ',' << format_double(node.position.y) << ','
                  << format_double(node.position.z) << ',' << format_double(node.clock_rate) << '\n';
        }
        files.write("nodes.csv", nodes.str());
        return kExitOk;
    });
}

int cmd_races(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Loaded l = load(options);
        if (!l.config.feeds) throw ConfigError("feeds", "races need a feeds block");
        const FeedModel& feeds = *l.config.feeds;
        const Scenario scenario = build_scenario(l.config, l.base_dir);
        const std::vector<ArrivalRecord> arrivals = deliver(scenario.quotes, scenario.network);
        const std::vector<RaceEvent> races = detect_races(arrivals, feeds);
        RaceSummary summary;
        if (l.config.horizon_us > 0.0) summary = race_summary(races, l.config.horizon_us, l.config.n_securities);

        OutputSet files(l.out_dir);
        files.write("races.csv", render([&](std::ostream& s) { write_races_csv(s, races); }));
        const json j = {{"races", summary.races},
                        {"window_us", feeds.race_window_us()},
                        {"feed_ratio", feeds.feed_ratio()},
                        {"duration_us", l.config.horizon_us},
                        {"n_securities", l.config.n_securities},
                        {"races_per_minute_per_security", summary.races_per_minute_per_security},
                        {"fast_win_fraction", summary.fast_win_fraction},
                        {"total_profit", summary.total_profit}};
        files.write("race_summary.json", j.dump(2) + "\n");

        out << "races: " << summary.races << '\n';
        out << "window_us: " << format_double(feeds.race_window_us()) << '\n';
        out << "feed_ratio: " << format_double(feeds.feed_ratio()) << '\n';
        out << "races_per_minute_per_security: " << format_double(summary.races_per_minute_per_security) << '\n';
        out << "fast_win_fraction: " << format_double(summary.fast_win_fraction) << '\n';
        out << "total_profit: " << summary.total_profit << '\n';
        return kExitOk;
    });
}

}  // namespace esim
