#include "esim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "esim/error.hpp"

namespace esim {

using json = nlohmann::json;

namespace {

// Object reader that tracks the field path for diagnostics and rejects
// unknown keys.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_.empty() ? "<root>" : path_, what); }
    [[noreturn]] void fail(std::string_view key, const std::string& what) const {
        throw ConfigError(sub(key), what);
    }

    std::string sub(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return j_.contains(std::string(key)); }

    const json& at(std::string_view key) {
        used_.insert(std::string(key));
        if (!has(key)) fail(key, "required field is missing");
        return j_.at(std::string(key));
    }

    const json* maybe(std::string_view key) {
        used_.insert(std::string(key));
        return has(key) ? &j_.at(std::string(key)) : nullptr;
    }

    double number(std::string_view key) {
        const json& v = at(key);
        if (!v.is_number()) fail(key, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key, "expected a finite number");
        return d;
    }
    double number(std::string_view key, double fallback) { return has(key) ? number(key) : (used_.insert(std::string(key)), fallback); }

    std::int64_t integer(std::string_view key) {
        const json& v = at(key);
        if (!v.is_number_integer()) fail(key, "expected an integer");
        return v.get<std::int64_t>();
    }
    std::int64_t integer(std::string_view key, std::int64_t fallback) {
        return has(key) ? integer(key) : (used_.insert(std::string(key)), fallback);
    }

    std::uint64_t unsigned_integer(std::string_view key) {
        const json& v = at(key);
        if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }
    std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) {
        return has(key) ? unsigned_integer(key) : (used_.insert(std::string(key)), fallback);
    }

    std::string string(std::string_view key) {
        const json& v = at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }
    std::string string(std::string_view key, std::string fallback) {
        return has(key) ? string(key) : (used_.insert(std::string(key)), fallback);
    }

    bool boolean(std::string_view key, bool fallback) {
        used_.insert(std::string(key));
        if (!has(key)) return fallback;
        const json& v = j_.at(std::string(key));
        if (!v.is_boolean()) fail(key, "expected true or false");
        return v.get<bool>();
    }

    const json& array(std::string_view key) {
        const json& v = at(key);
        if (!v.is_array()) fail(key, "expected an array");
        return v;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) fail(key, "unknown field");
        }
    }

    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

ExchangeId exchange_id(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xFFFFFFFFull) {
        throw ConfigError(path, "expected an exchange id (non-negative 32-bit integer)");
    }
    return static_cast<ExchangeId>(v.get<std::uint64_t>());
}

Vec3 vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3 || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
        throw ConfigError(path, "expected [x, y, z]");
    }
    Vec3 out{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    if (!out.finite()) throw ConfigError(path, "components must be finite");
    return out;
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

// ---- network ------------------------------------------------------------------

Medium parse_medium(Obj& o, std::string_view key) {
    const std::string kind = o.string(key);
    Medium m;
    if (kind == "vacuum") {
        m = Medium::vacuum();
    } else if (kind == "fiber") {
        m = Medium::fiber();
    } else if (kind == "microwave") {
        m = Medium::microwave();
    } else {
        o.fail(key, "unknown medium '" + kind + "' (vacuum, fiber, microwave)");
    }
    m.refractive_index = o.number("n", m.refractive_index);
    if (!(m.refractive_index >= 1.0)) o.fail("n", "refractive index must be >= 1");
    return m;
}

JitterSpec parse_jitter(const json& j, const std::string& path) {
    Obj o(j, path);
    JitterSpec s;
    const std::string dist = o.string("dist");
    if (dist == "uniform") {
        s.distribution = JitterSpec::Distribution::Uniform;
    } else if (dist == "exponential") {
        s.distribution = JitterSpec::Distribution::Exponential;
    } else {
        o.fail("dist", "unknown distribution '" + dist + "' (uniform, exponential)");
    }
    const json& params = o.array("params");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i].is_number()) throw ConfigError(index_path(o.sub("params"), i), "expected a number");
        s.params.push_back(params[i].get<double>());
    }
    s.seed = o.unsigned_integer("seed", 0);
    o.finish();
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        o.fail(e.what());
    }
    return s;
}

json jitter_json(const JitterSpec& s) {
    return {{"dist", std::string(to_string(s.distribution))}, {"params", s.params}, {"seed", s.seed}};
}

NetworkConfig parse_network(const json& j, const std::string& path) {
    Obj o(j, path);
    NetworkConfig n;
    const std::string metric = o.string("distance", "chord");
    if (metric == "chord") {
        n.distance = DistanceMetric::Chord;
    } else if (metric == "great_circle") {
        n.distance = DistanceMetric::GreatCircle;
    } else {
        o.fail("distance", "expected 'chord' or 'great_circle'");
    }
    if (const json* d = o.maybe("default_link")) {
        Obj dl(*d, o.sub("default_link"));
        n.default_link = parse_medium(dl, "medium");
        dl.finish();
    }

    const json& nodes = o.array("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Obj no(nodes[i], index_path(o.sub("nodes"), i));
        NodeConfig c;
        c.id = exchange_id(no.at("id"), no.sub("id"));
        c.name = no.string("name");
        c.lat = no.number("lat");
        if (c.lat < -90.0 || c.lat > 90.0) no.fail("lat", "latitude must be in [-90, 90]");
        c.lon = no.number("lon");
        if (c.lon < -180.0 || c.lon > 180.0) no.fail("lon", "longitude must be in [-180, 180]");
        c.alt_m = no.number("alt_m", 0.0);
        if (const json* rate = no.maybe("clock_rate")) {
            if (rate->is_string() && rate->get<std::string>() == "gravitational") {
                c.gravitational_clock = true;
                c.clock_rate = 1.0;
            } else if (rate->is_number()) {
                c.clock_rate = rate->get<double>();
            } else {
                no.fail("clock_rate", "expected a number or \"gravitational\"");
            }
        }
        no.finish();
        n.nodes.push_back(c);
    }

    static const json kNoLinks = json::array();
    const json& links = o.has("links") ? o.array("links") : kNoLinks;
    for (std::size_t i = 0; i < links.size(); ++i) {
        Obj lo(links[i], index_path(o.sub("links"), i));
        Link l;
        l.from = exchange_id(lo.at("from"), lo.sub("from"));
        l.to = exchange_id(lo.at("to"), lo.sub("to"));
        l.medium = parse_medium(lo, "medium");
        if (lo.has("distance_km")) l.distance_override_km = lo.number("distance_km");
        if (const json* jit = lo.maybe("jitter")) l.jitter = parse_jitter(*jit, lo.sub("jitter"));
        lo.finish();
        n.links.push_back(l);
    }

    Obj so(o.at("sip"), o.sub("sip"));
    if (so.has("node") == so.has("position_km")) so.fail("give exactly one of 'node' or 'position_km'");
    if (so.has("node")) {
        n.sip = exchange_id(so.at("node"), so.sub("node"));
    } else {
        n.sip = vec3(so.at("position_km"), so.sub("position_km"));
    }
    so.finish();
    o.finish();
    return n;
}

json medium_json(const Medium& m) {
    return {{"medium", std::string(to_string(m.kind))}, {"n", m.refractive_index}};
}

json network_json(const NetworkConfig& n) {
    json j;
    j["distance"] = std::string(to_string(n.distance));
    if (n.default_link) j["default_link"] = medium_json(*n.default_link);
    j["nodes"] = json::array();
    for (const NodeConfig& c : n.nodes) {
        json node = {{"id", c.id}, {"name", c.name}, {"lat", c.lat}, {"lon", c.lon}, {"alt_m", c.alt_m}};
        node["clock_rate"] = c.gravitational_clock ? json("gravitational") : json(c.clock_rate);
        j["nodes"].push_back(node);
    }
    j["links"] = json::array();
    for (const Link& l : n.links) {
        json link = medium_json(l.medium);
        link["from"] = l.from;
        link["to"] = l.to;
        if (l.distance_override_km) link["distance_km"] = *l.distance_override_km;
        if (l.jitter) link["jitter"] = jitter_json(*l.jitter);
        j["links"].push_back(link);
    }
    if (const auto* id = std::get_if<ExchangeId>(&n.sip)) {
        j["sip"] = {{"node", *id}};
    } else {
        j["sip"] = {{"position_km", vec3_json(std::get<Vec3>(n.sip))}};
    }
    return j;
}

// ---- streams ------------------------------------------------------------------

StreamConfig parse_stream(const json& j, const std::string& path) {
    Obj o(j, path);
    const std::string kind = o.string("kind");
    StreamConfig out;
    if (kind == "poisson") {
        PoissonStream p;
        p.spec.exchange = exchange_id(o.at("exchange"), o.sub("exchange"));
        p.spec.seed = o.unsigned_integer("seed", 0);
        p.spec.rate_per_s = o.number("rate_per_s");
        p.spec.mid_walk.start_ticks = o.integer("mid_start_ticks", p.spec.mid_walk.start_ticks);
        p.spec.mid_walk.step_ticks = o.integer("mid_step_ticks", p.spec.mid_walk.step_ticks);
        p.spec.spread_ticks = o.integer("spread_ticks", p.spec.spread_ticks);
        p.spec.lot_shares = o.integer("lot_shares", p.spec.lot_shares);
        p.spec.max_lots = o.integer("max_lots", p.spec.max_lots);
        p.spec.start_us = o.number("start_us", 0.0);
        p.spec.duration_us = 0.0;  // runs to the horizon
        if (!(p.spec.rate_per_s > 0.0)) o.fail("rate_per_s", "must be > 0");
        out = p;
    } else if (kind == "shock") {
        ShockStream s;
        const json& ex = o.array("exchanges");
        for (std::size_t i = 0; i < ex.size(); ++i) {
            s.spec.exchanges.push_back(exchange_id(ex[i], index_path(o.sub("exchanges"), i)));
        }
        if (s.spec.exchanges.empty()) o.fail("exchanges", "needs at least one exchange");
        s.spec.seed = o.unsigned_integer("seed", 0);
        s.spec.shock_rate_per_s = o.number("shock_rate_per_s");
        s.spec.start_mid_ticks = o.integer("start_mid_ticks", s.spec.start_mid_ticks);
        s.spec.jump_ticks = o.integer("jump_ticks", s.spec.jump_ticks);
        s.spec.spread_ticks = o.integer("spread_ticks", s.spec.spread_ticks);
        s.spec.size = o.integer("size", s.spec.size);
        s.spec.response_min_us = o.number("response_min_us", s.spec.response_min_us);
        s.spec.response_max_us = o.number("response_max_us", s.spec.response_max_us);
        s.spec.duration_us = 0.0;  // runs to the horizon
        if (!(s.spec.shock_rate_per_s > 0.0)) o.fail("shock_rate_per_s", "must be > 0");
        out = s;
    } else if (kind == "events") {
        out = EventsStream{o.string("path")};
    } else if (kind == "fixture") {
        FixtureStream f{o.string("name")};
        if (f.name != "theorem1") o.fail("name", "unknown fixture '" + f.name + "' (theorem1)");
        out = f;
    } else {
        o.fail("kind", "unknown stream kind '" + kind + "' (poisson, shock, events, fixture)");
    }
    o.finish();
    return out;
}

json stream_json(const StreamConfig& s) {
    if (const auto* p = std::get_if<PoissonStream>(&s)) {
        return {{"kind", "poisson"},
                {"exchange", p->spec.exchange},
                {"seed", p->spec.seed},
                {"rate_per_s", p->spec.rate_per_s},
                {"mid_start_ticks", p->spec.mid_walk.start_ticks},
                {"mid_step_ticks", p->spec.mid_walk.step_ticks},
                {"spread_ticks", p->spec.spread_ticks},
                {"lot_shares", p->spec.lot_shares},
                {"max_lots", p->spec.max_lots},
                {"start_us", p->spec.start_us}};
    }
    if (const auto* k = std::get_if<ShockStream>(&s)) {
        return {{"kind", "shock"},
                {"exchanges", k->spec.exchanges},
                {"seed", k->spec.seed},
                {"shock_rate_per_s", k->spec.shock_rate_per_s},
                {"start_mid_ticks", k->spec.start_mid_ticks},
                {"jump_ticks", k->spec.jump_ticks},
                {"spread_ticks", k->spec.spread_ticks},
                {"size", k->spec.size},
                {"response_min_us", k->spec.response_min_us},
                {"response_max_us", k->spec.response_max_us}};
    }
    if (const auto* e = std::get_if<EventsStream>(&s)) return {{"kind", "events"}, {"path", e->path}};
    return {{"kind", "fixture"}, {"name", std::get<FixtureStream>(s).name}};
}

// ---- conventions --------------------------------------------------------------

const std::map<std::string, ConventionConfig::Kind, std::less<>>& convention_kinds() {
    static const std::map<std::string, ConventionConfig::Kind, std::less<>> kinds{
        {"arrival_order", ConventionConfig::Kind::ArrivalOrder},
        {"lab_frame_emission", ConventionConfig::Kind::LabFrameEmission},
        {"boosted_frame_emission", ConventionConfig::Kind::BoostedFrameEmission},
        {"uncertainty_interval", ConventionConfig::Kind::UncertaintyInterval},
    };
    return kinds;
}

ConventionConfig parse_convention(const json& j, const std::string& path) {
    Obj o(j, path);
    ConventionConfig c;
    c.name = o.string("name");
    if (c.name.empty() || !std::all_of(c.name.begin(), c.name.end(), [](char ch) {
            return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
        })) {
        o.fail("name", "convention names use letters, digits, '_' and '-' only");
    }
    const std::string kind = o.string("kind");
    auto it = convention_kinds().find(kind);
    if (it == convention_kinds().end()) o.fail("kind", "unknown convention kind '" + kind + "'");
    c.kind = it->second;

    using K = ConventionConfig::Kind;
    if (c.kind == K::BoostedFrameEmission) {
        if (o.has("velocity_km_per_us") == o.has("flip_events")) {
            o.fail("boosted_frame_emission needs exactly one of 'velocity_km_per_us' or 'flip_events'");
        }
        if (o.has("velocity_km_per_us")) {
            c.velocity_km_per_us = vec3(o.at("velocity_km_per_us"), o.sub("velocity_km_per_us"));
            if (!(c.velocity_km_per_us->norm() < phys::kSpeedOfLight)) {
                o.fail("velocity_km_per_us", "boost speed must be below c = 0.299792458 km/us");
            }
        } else {
            const json& ev = o.at("flip_events");
            if (!ev.is_array() || ev.size() != 2 || !ev[0].is_number_unsigned() || !ev[1].is_number_unsigned()) {
                o.fail("flip_events", "expected [event_id_a, event_id_b]");
            }
            c.flip_events = std::pair{ev[0].get<EventId>(), ev[1].get<EventId>()};
            if (c.flip_events->first == c.flip_events->second) o.fail("flip_events", "needs two distinct events");
        }
    }
    if (c.kind == K::UncertaintyInterval) {
        c.epsilon_us = o.number("epsilon_us");
        if (!(c.epsilon_us >= 0.0)) o.fail("epsilon_us", "must be >= 0");
    }
    o.finish();
    return c;
}

json convention_json(const ConventionConfig& c) {
    json j = {{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    if (c.velocity_km_per_us) j["velocity_km_per_us"] = vec3_json(*c.velocity_km_per_us);
    if (c.flip_events) j["flip_events"] = {c.flip_events->first, c.flip_events->second};
    if (c.kind == ConventionConfig::Kind::UncertaintyInterval) j["epsilon_us"] = c.epsilon_us;
    return j;
}

// ---- feeds and outputs -----------------------------------------------------------

FeedModel parse_feeds(const json& j, const std::string& path) {
    Obj o(j, path);
    FeedModel f;
    f.delta_direct_us = o.number("delta_direct_us");
    f.delta_sip_us = o.number("delta_sip_us");
    f.reaction_us = o.number("reaction_us", 0.0);
    if (const json* jit = o.maybe("reaction_jitter")) f.reaction_jitter = parse_jitter(*jit, o.sub("reaction_jitter"));
    o.finish();
    if (!f.valid()) o.fail("latencies must be >= 0 with delta_direct_us < delta_sip_us");
    return f;
}

json feeds_json(const FeedModel& f) {
    json j = {{"delta_direct_us", f.delta_direct_us}, {"delta_sip_us", f.delta_sip_us}, {"reaction_us", f.reaction_us}};
    if (f.reaction_jitter) j["reaction_jitter"] = jitter_json(*f.reaction_jitter);
    return j;
}

// ---- whole-config checks ---------------------------------------------------------

void cross_check(const ScenarioConfig& c) {
    if (c.network.nodes.empty()) throw ConfigError("network.nodes", "at least one exchange is required");
    if (c.streams.empty()) throw ConfigError("streams", "at least one stream source is required");
    if (c.conventions.empty()) throw ConfigError("conventions", "at least one convention is required");
    std::set<std::string> names;
    for (std::size_t i = 0; i < c.conventions.size(); ++i) {
        if (!names.insert(c.conventions[i].name).second) {
            throw ConfigError(index_path("conventions", i) + ".name", "duplicate convention name");
        }
    }
    std::set<ExchangeId> ids;
    for (const NodeConfig& n : c.network.nodes) ids.insert(n.id);
    for (std::size_t i = 0; i < c.streams.size(); ++i) {
        const std::string path = index_path("streams", i);
        if (const auto* p = std::get_if<PoissonStream>(&c.streams[i]); p && !ids.count(p->spec.exchange)) {
            throw ConfigError(path + ".exchange", "unknown exchange " + std::to_string(p->spec.exchange));
        }
        if (const auto* s = std::get_if<ShockStream>(&c.streams[i])) {
            for (ExchangeId e : s->spec.exchanges) {
                if (!ids.count(e)) throw ConfigError(path + ".exchanges", "unknown exchange " + std::to_string(e));
            }
        }
        if (std::holds_alternative<FixtureStream>(c.streams[i]) && (!ids.count(1) || !ids.count(2))) {
            throw ConfigError(path, "the theorem1 fixture needs exchanges 1 and 2");
        }
    }
    if (const auto* sip = std::get_if<ExchangeId>(&c.network.sip); sip && !ids.count(*sip)) {
        throw ConfigError("network.sip.node", "unknown exchange " + std::to_string(*sip));
    }
    // Surfaces coordinate, link and SIP problems at parse time.
    build_network(c.network, c.seed);
}

std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(ConventionConfig::Kind k) {
    for (const auto& [name, kind] : convention_kinds()) {
        if (kind == k) return name;
    }
    return "?";
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t local) {
    return splitmix64(master ^ splitmix64(local));
}

ScenarioConfig parse_config(std::string_view text, std::string_view source_name) {
    const std::string source(source_name);
    json j;
    try {
        j = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ":" + line_col(text, e.byte > 0 ? e.byte - 1 : 0), "syntax error");
    }

    try {
        Obj o(j, "");
        ScenarioConfig c;
        if (!o.has("seed")) o.fail("seed", "required field is missing (runs are seeded explicitly)");
        c.seed = o.unsigned_integer("seed");
        c.horizon_us = o.number("horizon_us");
        if (!(c.horizon_us >= 0.0)) o.fail("horizon_us", "must be >= 0");
        c.lightcone_epsilon_km2 = o.number("lightcone_epsilon_km2", kDefaultLightconeEpsilon);
        if (!(c.lightcone_epsilon_km2 >= 0.0)) o.fail("lightcone_epsilon_km2", "must be >= 0");
        c.n_securities = static_cast<int>(o.integer("n_securities", 1));
        if (c.n_securities < 1) o.fail("n_securities", "must be >= 1");
        c.network = parse_network(o.at("network"), "network");

        const json& streams = o.array("streams");
        for (std::size_t i = 0; i < streams.size(); ++i) {
            c.streams.push_back(parse_stream(streams[i], index_path("streams", i)));
        }
        const json& conventions = o.array("conventions");
        for (std::size_t i = 0; i < conventions.size(); ++i) {
            c.conventions.push_back(parse_convention(conventions[i], index_path("conventions", i)));
        }
        if (const json* f = o.maybe("feeds")) c.feeds = parse_feeds(*f, "feeds");
        if (const json* out = o.maybe("outputs")) {
            Obj oo(*out, "outputs");
            c.outputs.dir = oo.string("dir", c.outputs.dir);
            c.outputs.interval_nbbo = oo.boolean("interval_nbbo", true);
            c.outputs.causal_graph = oo.boolean("causal_graph", true);
            oo.finish();
        }
        o.finish();
        cross_check(c);
        return c;
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        const std::string detail = e.where().empty() ? what : what.substr(e.where().size() + 2);
        throw ConfigError(source + ": " + e.where(), detail);
    } catch (const json::exception& e) {
        throw ConfigError(source, e.what());
    }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

std::string serialize_config(const ScenarioConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["horizon_us"] = c.horizon_us;
    j["lightcone_epsilon_km2"] = c.lightcone_epsilon_km2;
    j["n_securities"] = c.n_securities;
    j["network"] = network_json(c.network);
    j["streams"] = json::array();
    for (const StreamConfig& s : c.streams) j["streams"].push_back(stream_json(s));
    j["conventions"] = json::array();
    for (const ConventionConfig& cc : c.conventions) j["conventions"].push_back(convention_json(cc));
    if (c.feeds) j["feeds"] = feeds_json(*c.feeds);
    j["outputs"] = {{"dir", c.outputs.dir},
                    {"interval_nbbo", c.outputs.interval_nbbo},
                    {"causal_graph", c.outputs.causal_graph}};
    return j.dump(2) + "\n";
}

Network build_network(const NetworkConfig& config, std::uint64_t master_seed) {
    try {
        std::vector<ExchangeNode> nodes;
        for (const NodeConfig& n : config.nodes) {
            const double rate = n.gravitational_clock ? gravitational_rate(n.alt_m) : n.clock_rate;
            nodes.push_back(ExchangeNode::make(n.id, n.name, n.lat, n.lon, n.alt_m, rate));
        }
        std::vector<Link> links = config.links;
        for (Link& l : links) {
            if (l.jitter) l.jitter->seed = derive_seed(master_seed, l.jitter->seed);
        }
        Network::Options options;
        options.metric = config.distance;
        options.default_link = config.default_link;
        return Network(std::move(nodes), std::move(links), config.sip, options);
    } catch (const InvalidArgument& e) {
        throw ConfigError("network", e.what());
    } catch (const UnknownId& e) {
        throw ConfigError("network", e.what());
    } catch (const CausalityViolation& e) {
        throw ConfigError("network", e.what());
    }
}

Scenario build_scenario(const ScenarioConfig& config, const std::filesystem::path& base_dir) {
    Network network = build_network(config.network, config.seed);
    std::vector<QuoteUpdate> quotes;
    for (std::size_t i = 0; i < config.streams.size(); ++i) {
        const std::string path = index_path("streams", i);
        std::vector<QuoteUpdate> batch;
        try {
            if (const auto* p = std::get_if<PoissonStream>(&config.streams[i])) {
                StreamSpec spec = p->spec;
                spec.seed = derive_seed(config.seed, spec.seed);
                spec.duration_us = std::max(0.0, config.horizon_us - spec.start_us);
                batch = generate_stream(spec, network.node(spec.exchange));
            } else if (const auto* s = std::get_if<ShockStream>(&config.streams[i])) {
                ShockSpec spec = s->spec;
                spec.seed = derive_seed(config.seed, spec.seed);
                spec.duration_us = config.horizon_us;
                batch = generate_shock_streams(spec, network);
            } else if (const auto* e = std::get_if<EventsStream>(&config.streams[i])) {
                std::filesystem::path file(e->path);
                if (file.is_relative()) file = base_dir / file;
                batch = load_scenario(file, network);
            } else {
                batch = theorem1_fixture();
                for (QuoteUpdate& q : batch) q.event.x = network.node(q.exchange).position;
            }
        } catch (const InvalidArgument& e) {
            throw ConfigError(path, e.what());
        }
        quotes.insert(quotes.end(), batch.begin(), batch.end());
    }
    // Flip pairs resolve against every event, including ones past the horizon.
    const std::vector<QuoteUpdate> all = quotes;
    std::erase_if(quotes, [&](const QuoteUpdate& q) { return !(q.event.t < config.horizon_us); });
    validate_quotes(quotes, network);

    std::vector<NamedConvention> conventions;
    for (std::size_t i = 0; i < config.conventions.size(); ++i) {
        const ConventionConfig& c = config.conventions[i];
        using K = ConventionConfig::Kind;
        switch (c.kind) {
            case K::ArrivalOrder: conventions.push_back({c.name, ArrivalOrder{}}); break;
            case K::LabFrameEmission: conventions.push_back({c.name, LabFrameEmission{}}); break;
            case K::UncertaintyInterval: conventions.push_back({c.name, UncertaintyInterval{c.epsilon_us}}); break;
            case K::BoostedFrameEmission: {
                if (c.velocity_km_per_us) {
                    conventions.push_back({c.name, BoostedFrameEmission{LorentzBoost(*c.velocity_km_per_us), {}}});
                    break;
                }
                auto find = [&](EventId id) -> const QuoteUpdate& {
                    for (const QuoteUpdate& q : all) {
                        if (q.event.id == id) return q;
                    }
                    throw ConfigError(index_path("conventions", i) + ".flip_events",
                                      "event " + std::to_string(id) + " is not in the scenario");
                };
                const QuoteUpdate& a = find(c.flip_events->first);
                const QuoteUpdate& b = find(c.flip_events->second);
                // About the pair's midpoint so boosted times stay near lab times.
                SpacetimeEvent origin;
                origin.x = (a.event.x + b.event.x) * 0.5;
                origin.t = 0.5 * (a.event.t + b.event.t);
                conventions.push_back({c.name, BoostedFrameEmission{flip_boost(a.event, b.event), origin}});
                break;
            }
        }
    }
    return Scenario{std::move(network), std::move(quotes), std::move(conventions)};
}

}  // namespace esim
