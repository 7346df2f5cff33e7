#include "esim/quotes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_set>

#include "esim/error.hpp"

namespace esim {

namespace {

constexpr Ticks kMaxPrice = (Ticks{1} << 31) - 1;
constexpr double kPositionToleranceKm = 1e-6;
constexpr double kAskOffsetUs = 1e-3;
constexpr EventId kShockIdFlag = EventId{1} << 39;

EventId stream_event_id(ExchangeId exchange, std::uint64_t seq) {
    return (static_cast<EventId>(exchange) << 40) | seq;
}

// Reflect into [lo, hi].
Ticks reflect(Ticks v, Ticks lo, Ticks hi) {
    while (v < lo || v > hi) {
        if (v < lo) v = 2 * lo - v;
        if (v > hi) v = 2 * hi - v;
    }
    return v;
}

double strictly_after(double t, double last) {
    return t > last ? t : std::nextafter(last, INFINITY);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, const std::string& where, std::string_view what) {
    T value{};
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(where, "malformed " + std::string(what) + " '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

std::string_view to_string(Side s) { return s == Side::Bid ? "bid" : "ask"; }

bool emission_before(const QuoteUpdate& a, const QuoteUpdate& b) {
    if (a.event.t != b.event.t) return a.event.t < b.event.t;
    if (a.exchange != b.exchange) return a.exchange < b.exchange;
    return a.event.id < b.event.id;
}

// ---- synthetic streams --------------------------------------------------------

std::vector<QuoteUpdate> generate_stream(const StreamSpec& spec, const ExchangeNode& node) {
    if (!(spec.rate_per_s > 0.0)) throw InvalidArgument("stream rate must be positive");
    if (spec.spread_ticks < 1) throw InvalidArgument("stream spread must be at least one tick");
    if (spec.lot_shares < 1 || spec.max_lots < 1) throw InvalidArgument("stream sizes must be positive");
    if (spec.mid_walk.step_ticks < 0) throw InvalidArgument("mid walk step must be >= 0");
    std::vector<QuoteUpdate> out;
    if (!(spec.duration_us > 0.0)) return out;

    const Ticks half = spec.spread_ticks / 2;
    const Ticks lo = half + 1;
    const Ticks hi = kMaxPrice - spec.spread_ticks;
    if (lo > hi) throw InvalidArgument("stream spread leaves no valid price range");

    std::mt19937_64 gen(spec.seed);
    std::exponential_distribution<double> gap(spec.rate_per_s / 1e6);  // per us
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<std::int64_t> lots(1, spec.max_lots);

    Ticks mid = reflect(std::clamp(spec.mid_walk.start_ticks, lo, hi), lo, hi);
    const double end = spec.start_us + spec.duration_us;
    double t = spec.start_us;
    double last = -INFINITY;
    for (std::uint64_t seq = 0;; ++seq) {
        t += gap(gen);
        if (!(t < end)) break;
        t = strictly_after(t, last);
        last = t;
        mid = reflect(mid + (coin(gen) ? spec.mid_walk.step_ticks : -spec.mid_walk.step_ticks), lo, hi);
        const Side side = coin(gen) ? Side::Bid : Side::Ask;
        QuoteUpdate q;
        q.event = {stream_event_id(node.id, seq), node.position, t};
        q.exchange = node.id;
        q.side = side;
        q.price_ticks = side == Side::Bid ? mid - half : mid - half + spec.spread_ticks;
        q.size = spec.lot_shares * lots(gen);
        out.push_back(q);
    }
    return out;
}

std::vector<QuoteUpdate> generate_shock_streams(const ShockSpec& spec, const Network& network) {
    if (!(spec.shock_rate_per_s > 0.0)) throw InvalidArgument("shock rate must be positive");
    if (spec.spread_ticks < 1 || spec.jump_ticks < 1 || spec.size < 1) {
        throw InvalidArgument("shock stream spread, jump and size must be positive");
    }
    if (!(spec.response_min_us >= 0.0) || !(spec.response_max_us >= spec.response_min_us)) {
        throw InvalidArgument("shock response range must satisfy 0 <= min <= max");
    }
    std::vector<QuoteUpdate> out;
    if (!(spec.duration_us > 0.0) || spec.exchanges.empty()) return out;

    std::vector<const ExchangeNode*> nodes;
    for (ExchangeId id : spec.exchanges) nodes.push_back(&network.node(id));

    const Ticks half = spec.spread_ticks / 2;
    const Ticks lo = half + 1;
    const Ticks hi = kMaxPrice - spec.spread_ticks;

    std::mt19937_64 gen(spec.seed);
    std::exponential_distribution<double> gap(spec.shock_rate_per_s / 1e6);
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> response(spec.response_min_us, spec.response_max_us);

    std::vector<double> last(nodes.size(), -INFINITY);
    std::vector<std::uint64_t> seq(nodes.size(), 0);
    auto requote = [&](double when, Ticks mid) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double t_bid = strictly_after(when + response(gen), last[i]);
            const double t_ask = strictly_after(t_bid + kAskOffsetUs, t_bid);
            last[i] = t_ask;
            if (!(t_bid < spec.duration_us)) continue;
            for (const auto& [side, t] : {std::pair{Side::Bid, t_bid}, std::pair{Side::Ask, t_ask}}) {
                if (!(t < spec.duration_us)) continue;
                QuoteUpdate q;
                q.event = {stream_event_id(nodes[i]->id, kShockIdFlag | seq[i]++), nodes[i]->position, t};
                q.exchange = nodes[i]->id;
                q.side = side;
                q.price_ticks = side == Side::Bid ? mid - half : mid - half + spec.spread_ticks;
                q.size = spec.size;
                out.push_back(q);
            }
        }
    };

    Ticks mid = reflect(std::clamp(spec.start_mid_ticks, lo, hi), lo, hi);
    requote(0.0, mid);
    for (double t = gap(gen); t < spec.duration_us; t += gap(gen)) {
        mid = reflect(mid + (coin(gen) ? spec.jump_ticks : -spec.jump_ticks), lo, hi);
        requote(t, mid);
    }
    std::sort(out.begin(), out.end(), emission_before);
    return out;
}

// ---- fixtures -----------------------------------------------------------------

Network theorem1_network() {
    using namespace theorem1;
    // Longitude whose equatorial chord from (0, 0) is exactly the separation.
    const double lon_b =
        2.0 * std::asin(kSeparationKm / (2.0 * phys::kEarthRadiusKm)) * 180.0 / std::numbers::pi;
    std::vector<ExchangeNode> nodes{
        ExchangeNode::make(kExchangeA, "A", 0.0, 0.0, 0.0),
        ExchangeNode::make(kExchangeB, "B", 0.0, lon_b, 0.0),
    };
    std::vector<Link> links{Link{kExchangeB, kExchangeA, Medium::fiber(1.5), kSeparationKm, std::nullopt}};
    Network::Options options;
    options.default_link = Medium::fiber(1.5);
    return Network(std::move(nodes), std::move(links), kExchangeA, options);
}

std::vector<QuoteUpdate> theorem1_fixture() {
    using namespace theorem1;
    const Network net = theorem1_network();
    QuoteUpdate alpha{{kAlpha, net.node(kExchangeA).position, 50.0}, kExchangeA, Side::Bid, 100, 100};
    QuoteUpdate beta{{kBeta, net.node(kExchangeB).position, 0.0}, kExchangeB, Side::Bid, 101, 100};
    return {alpha, beta};
}

// ---- event files --------------------------------------------------------------

void validate_quotes(std::vector<QuoteUpdate>& quotes, const Network& network) {
    std::unordered_set<EventId> ids;
    for (const QuoteUpdate& q : quotes) {
        const std::string who = "event " + std::to_string(q.event.id);
        if (!ids.insert(q.event.id).second) throw ConfigError(who, "duplicate event id");
        if (q.price_ticks <= 0) throw ConfigError(who, "price must be > 0 ticks");
        if (q.size <= 0) throw ConfigError(who, "size must be > 0 shares");
        if (!std::isfinite(q.event.t)) throw ConfigError(who, "emission time must be finite");
        const ExchangeNode* node = network.find_node(q.exchange);
        if (!node) throw ConfigError(who, "unknown exchange id " + std::to_string(q.exchange));
        if ((q.event.x - node->position).norm() > kPositionToleranceKm) {
            throw ConfigError(who, "position does not match exchange " + std::to_string(q.exchange));
        }
    }
    std::sort(quotes.begin(), quotes.end(), emission_before);
    std::map<ExchangeId, double> last;
    for (const QuoteUpdate& q : quotes) {
        auto [it, fresh] = last.try_emplace(q.exchange, q.event.t);
        if (!fresh) {
            if (!(q.event.t > it->second)) {
                throw ConfigError("event " + std::to_string(q.event.id),
                                  "emission time ties an earlier quote at exchange " +
                                      std::to_string(q.exchange));
            }
            it->second = q.event.t;
        }
    }
}

std::vector<QuoteUpdate> parse_scenario_events(std::string_view text, const Network& network,
                                               std::string_view source_name) {
    static constexpr std::string_view kColumns[] = {"event_id", "exchange_id", "t_emit_us",
                                                    "side",     "price_ticks", "size"};
    std::vector<QuoteUpdate> quotes;
    bool have_header = false;
    bool with_position = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
        const auto fields = split_fields(line);
        if (!have_header) {
            if (fields.size() != 6 && fields.size() != 9) {
                throw ConfigError(where, "expected header event_id,exchange_id,t_emit_us,side,price_ticks,size[,x_km,y_km,z_km]");
            }
            for (std::size_t i = 0; i < 6; ++i) {
                if (fields[i] != kColumns[i]) {
                    throw ConfigError(where, "header column " + std::to_string(i + 1) + " must be '" +
                                                 std::string(kColumns[i]) + "'");
                }
            }
            with_position = fields.size() == 9;
            if (with_position && (fields[6] != "x_km" || fields[7] != "y_km" || fields[8] != "z_km")) {
                throw ConfigError(where, "position columns must be x_km,y_km,z_km");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != (with_position ? 9u : 6u)) {
            throw ConfigError(where, "expected " + std::to_string(with_position ? 9 : 6) + " fields, got " +
                                         std::to_string(fields.size()));
        }
        QuoteUpdate q;
        q.event.id = parse_number<EventId>(fields[0], where, "event_id");
        q.exchange = parse_number<ExchangeId>(fields[1], where, "exchange_id");
        q.event.t = parse_number<double>(fields[2], where, "t_emit_us");
        if (fields[3] == "bid") {
            q.side = Side::Bid;
        } else if (fields[3] == "ask") {
            q.side = Side::Ask;
        } else {
            throw ConfigError(where, "side must be 'bid' or 'ask'");
        }
        q.price_ticks = parse_number<Ticks>(fields[4], where, "price_ticks");
        q.size = parse_number<Shares>(fields[5], where, "size");
        if (q.price_ticks <= 0) throw ConfigError(where, "price must be > 0 ticks");
        if (q.size <= 0) throw ConfigError(where, "size must be > 0 shares");
        const ExchangeNode* node = network.find_node(q.exchange);
        if (!node) throw ConfigError(where, "unknown exchange id " + std::to_string(q.exchange));
        if (with_position) {
            q.event.x = {parse_number<double>(fields[6], where, "x_km"),
                         parse_number<double>(fields[7], where, "y_km"),
                         parse_number<double>(fields[8], where, "z_km")};
            if ((q.event.x - node->position).norm() > kPositionToleranceKm) {
                throw ConfigError(where, "position does not match exchange " + std::to_string(q.exchange));
            }
        } else {
            q.event.x = node->position;
        }
        quotes.push_back(q);
    }
    validate_quotes(quotes, network);
    return quotes;
}

std::vector<QuoteUpdate> load_scenario(const std::filesystem::path& path, const Network& network) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open event file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_events(buf.str(), network, path.string());
}

}  // namespace esim
