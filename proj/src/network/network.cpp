#include "esim/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "esim/error.hpp"

namespace esim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double great_circle_km(const ExchangeNode& a, const ExchangeNode& b) {
    // Haversine on the mean sphere; altitude is ignored.
    const double phi1 = a.latitude_deg * kDegToRad;
    const double phi2 = b.latitude_deg * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = (b.longitude_deg - a.longitude_deg) * kDegToRad;
    const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2.0 * phys::kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

std::string id_str(ExchangeId id) { return std::to_string(id); }

}  // namespace

Vec3 node_position(double latitude_deg, double longitude_deg, double altitude_m) {
    if (!(std::abs(latitude_deg) <= 90.0)) {
        throw InvalidArgument("latitude " + std::to_string(latitude_deg) + " outside [-90, 90]");
    }
    if (!(std::abs(longitude_deg) <= 180.0)) {
        throw InvalidArgument("longitude " + std::to_string(longitude_deg) +
                              " outside [-180, 180]");
    }
    if (!std::isfinite(altitude_m) || altitude_m <= -phys::kEarthRadiusKm * 1000.0) {
        throw InvalidArgument("altitude must be finite and above the Earth's centre");
    }
    const double r = phys::kEarthRadiusKm + altitude_m / 1000.0;
    const double lat = latitude_deg * kDegToRad;
    const double lon = longitude_deg * kDegToRad;
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
            r * std::sin(lat)};
}

std::string_view to_string(DistanceMetric m) {
    return m == DistanceMetric::Chord ? "chord" : "great_circle";
}

std::string_view to_string(Medium::Kind k) {
    switch (k) {
        case Medium::Kind::Vacuum: return "vacuum";
        case Medium::Kind::Fiber: return "fiber";
        case Medium::Kind::Microwave: return "microwave";
    }
    return "?";
}

std::string_view to_string(JitterSpec::Distribution d) {
    return d == JitterSpec::Distribution::Uniform ? "uniform" : "exponential";
}

ExchangeNode ExchangeNode::make(ExchangeId id, std::string name, double latitude_deg,
                                double longitude_deg, double altitude_m, double clock_rate) {
    if (!(clock_rate > 0.0) || !std::isfinite(clock_rate)) {
        throw InvalidArgument("clock rate of node " + id_str(id) + " must be positive");
    }
    ExchangeNode n;
    n.id = id;
    n.name = std::move(name);
    n.latitude_deg = latitude_deg;
    n.longitude_deg = longitude_deg;
    n.altitude_m = altitude_m;
    n.position = node_position(latitude_deg, longitude_deg, altitude_m);
    n.clock_rate = clock_rate;
    return n;
}

// ---- jitter -------------------------------------------------------------------

void JitterSpec::validate() const {
    switch (distribution) {
        case Distribution::Uniform:
            if (params.size() != 2 || !(params[0] >= 0.0) || !(params[1] >= params[0]) ||
                !std::isfinite(params[1])) {
                throw InvalidArgument("uniform jitter needs params [lo_us, hi_us] with 0 <= lo <= hi");
            }
            break;
        case Distribution::Exponential:
            if (params.size() != 1 || !(params[0] >= 0.0) || !std::isfinite(params[0])) {
                throw InvalidArgument("exponential jitter needs params [mean_us] with mean >= 0");
            }
            break;
    }
}

double JitterSpec::draw(std::uint64_t index) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 gen(seq);
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
    double value = 0.0;
    switch (distribution) {
        case Distribution::Uniform: value = params[0] + (params[1] - params[0]) * u; break;
        case Distribution::Exponential: value = -params[0] * std::log1p(-u); break;
    }
    return std::max(0.0, value);
}

// ---- network ------------------------------------------------------------------

Network::Network(std::vector<ExchangeNode> nodes, std::vector<Link> links, SipLocation sip,
                 Options options)
    : nodes_(std::move(nodes)), links_(std::move(links)), sip_(sip), options_(options) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const ExchangeNode& a, const ExchangeNode& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (i > 0 && nodes_[i].id == nodes_[i - 1].id) {
            throw InvalidArgument("duplicate node id " + id_str(nodes_[i].id));
        }
        if (!nodes_[i].position.finite()) {
            throw InvalidArgument("node " + id_str(nodes_[i].id) + " has a non-finite position");
        }
    }
    if (const auto* id = std::get_if<ExchangeId>(&sip_)) {
        sip_position_ = node(*id).position;
    } else {
        sip_position_ = std::get<Vec3>(sip_);
        if (!sip_position_.finite()) throw InvalidArgument("SIP position must be finite");
    }
    if (options_.default_link && !(options_.default_link->refractive_index >= 1.0)) {
        throw InvalidArgument("default link refractive index must be >= 1");
    }
    for (const Link& link : links_) {
        if (!(link.medium.refractive_index >= 1.0)) {
            throw InvalidArgument("link " + id_str(link.from) + "-" + id_str(link.to) +
                                  " has refractive index below 1");
        }
        if (link.jitter) link.jitter->validate();
        const double d = effective_distance(link, *this);
        // The delay floor must respect light travel between the actual node positions.
        const double chord = (node(link.from).position - node(link.to).position).norm();
        if (medium_time(d, link.medium.refractive_index) < light_time(chord) * (1.0 - 1e-12)) {
            throw InvalidArgument("link " + id_str(link.from) + "-" + id_str(link.to) +
                                  " would be superluminal: its delay is shorter than the light "
                                  "time between the node positions");
        }
    }
}

const ExchangeNode* Network::find_node(ExchangeId id) const noexcept {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const ExchangeNode& n, ExchangeId v) { return n.id < v; });
    return it != nodes_.end() && it->id == id ? &*it : nullptr;
}

const ExchangeNode& Network::node(ExchangeId id) const {
    if (const auto* n = find_node(id)) return *n;
    throw UnknownId("unknown exchange id " + id_str(id));
}

std::optional<ExchangeId> Network::sip_node() const noexcept {
    if (const auto* id = std::get_if<ExchangeId>(&sip_)) return *id;
    return std::nullopt;
}

double Network::node_distance(ExchangeId a, ExchangeId b) const {
    const ExchangeNode& na = node(a);
    const ExchangeNode& nb = node(b);
    if (options_.metric == DistanceMetric::GreatCircle) return great_circle_km(na, nb);
    return (na.position - nb.position).norm();
}

const Link* Network::link_to_sip(ExchangeId exchange) const noexcept {
    const auto sip = sip_node();
    if (!sip) return nullptr;
    for (const Link& link : links_) {
        if ((link.from == exchange && link.to == *sip) || (link.to == exchange && link.from == *sip)) {
            return &link;
        }
    }
    return nullptr;
}

std::optional<Link> Network::default_link_to_sip(ExchangeId exchange) const {
    if (!options_.default_link) return std::nullopt;
    const ExchangeNode& n = node(exchange);
    Link link;
    link.from = exchange;
    link.to = sip_node().value_or(exchange);
    link.medium = *options_.default_link;
    // Straight line to the SIP; covers SIP positions that are not nodes.
    link.distance_override_km = (n.position - sip_position_).norm();
    return link;
}

double effective_distance(const Link& link, const Network& network) {
    const ExchangeNode& a = network.node(link.from);
    const ExchangeNode& b = network.node(link.to);
    const double d = link.distance_override_km ? *link.distance_override_km
                                               : network.node_distance(a.id, b.id);
    if (!std::isfinite(d) || d < 0.0) {
        throw InvalidArgument("link " + id_str(a.id) + "-" + id_str(b.id) +
                              " has an invalid distance");
    }
    if (d == 0.0 && a.id != b.id) {
        throw InvalidArgument("link " + id_str(a.id) + "-" + id_str(b.id) +
                              " joins distinct nodes at zero distance");
    }
    return d;
}

double propagation_delay(const Link& link, const Network& network, std::uint64_t draw_index) {
    const double base = medium_time(effective_distance(link, network), link.medium.refractive_index);
    return link.jitter ? base + link.jitter->draw(draw_index) : base;
}

Network us_equities_network() {
    using namespace us_equities_sites;
    std::vector<ExchangeNode> nodes{
        ExchangeNode::make(kMahwah, "Mahwah", 41.08, -74.16, 0.0),
        ExchangeNode::make(kCarteret, "Carteret", 40.58, -74.23, 0.0),
        ExchangeNode::make(kSecaucus, "Secaucus", 40.79, -74.06, 0.0),
        ExchangeNode::make(kWeehawken, "Weehawken", 40.77, -74.02, 0.0),
        ExchangeNode::make(kAurora, "Aurora", 41.76, -88.29, 0.0),
    };
    auto fiber = [](ExchangeId from, ExchangeId to, double km) {
        return Link{from, to, Medium::fiber(1.5), km, std::nullopt};
    };
    std::vector<Link> links{
        fiber(kMahwah, kCarteret, 43.0),
        fiber(kMahwah, kSecaucus, 34.0),
        fiber(kCarteret, kSecaucus, 27.0),
        fiber(kMahwah, kAurora, 1180.0),
    };
    Network::Options options;
    options.default_link = Medium::fiber(1.5);
    return Network(std::move(nodes), std::move(links), kMahwah, options);
}

}  // namespace esim
