#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "esim/spacetime.hpp"

namespace esim {

using ExchangeId = std::uint32_t;

// =============================================================================
// Geometry
// =============================================================================

// Spherical-Earth Cartesian position (km). x toward (0N, 0E), z toward the north pole.
Vec3 node_position(double latitude_deg, double longitude_deg, double altitude_m);

enum class DistanceMetric { Chord, GreatCircle };

std::string_view to_string(DistanceMetric m);

// =============================================================================
// Nodes and links
// =============================================================================

struct ExchangeNode {
    ExchangeId id = 0;
    std::string name;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double altitude_m = 0.0;
    Vec3 position;
    double clock_rate = 1.0;

    // Validates coordinates and derives the position.
    static ExchangeNode make(ExchangeId id, std::string name, double latitude_deg,
                             double longitude_deg, double altitude_m, double clock_rate = 1.0);
};

struct Medium {
    enum class Kind { Vacuum, Fiber, Microwave };

    Kind kind = Kind::Vacuum;
    double refractive_index = 1.0;

    static Medium vacuum() { return {Kind::Vacuum, 1.0}; }
    static Medium fiber(double n = 1.5) { return {Kind::Fiber, n}; }
    static Medium microwave(double n = 1.0003) { return {Kind::Microwave, n}; }

    bool operator==(const Medium&) const = default;
};

std::string_view to_string(Medium::Kind k);

// Additive, non-negative delay noise. Draw k is a pure function of (seed, k).
struct JitterSpec {
    enum class Distribution { Uniform, Exponential };

    Distribution distribution = Distribution::Uniform;
    std::vector<double> params;  // uniform: {lo_us, hi_us}; exponential: {mean_us}
    std::uint64_t seed = 0;

    // Throws InvalidArgument on malformed parameters.
    void validate() const;
    double draw(std::uint64_t index) const;

    bool operator==(const JitterSpec&) const = default;
};

std::string_view to_string(JitterSpec::Distribution d);

struct Link {
    ExchangeId from = 0;
    ExchangeId to = 0;
    Medium medium;
    std::optional<double> distance_override_km;
    std::optional<JitterSpec> jitter;

    bool operator==(const Link&) const = default;
};

// =============================================================================
// Network - immutable once constructed
// =============================================================================
class Network {
public:
    struct Options {
        DistanceMetric metric = DistanceMetric::Chord;
        // Medium used for exchanges that have no explicit link to the SIP.
        std::optional<Medium> default_link;
    };

    using SipLocation = std::variant<ExchangeId, Vec3>;

    Network(std::vector<ExchangeNode> nodes, std::vector<Link> links, SipLocation sip,
            Options options);
    Network(std::vector<ExchangeNode> nodes, std::vector<Link> links, SipLocation sip)
        : Network(std::move(nodes), std::move(links), sip, Options{}) {}

    // Sorted by id.
    const std::vector<ExchangeNode>& nodes() const noexcept { return nodes_; }
    const std::vector<Link>& links() const noexcept { return links_; }
    const Options& options() const noexcept { return options_; }

    const ExchangeNode& node(ExchangeId id) const;
    const ExchangeNode* find_node(ExchangeId id) const noexcept;

    const Vec3& sip_position() const noexcept { return sip_position_; }
    std::optional<ExchangeId> sip_node() const noexcept;

    // Metric distance between node positions (ignores overrides).
    double node_distance(ExchangeId a, ExchangeId b) const;

    // Link connecting exchange and SIP node in either direction, if any.
    const Link* link_to_sip(ExchangeId exchange) const noexcept;

    // Implicit link from an exchange to the SIP under the default-link policy.
    std::optional<Link> default_link_to_sip(ExchangeId exchange) const;

private:
    std::vector<ExchangeNode> nodes_;
    std::vector<Link> links_;
    SipLocation sip_;
    Vec3 sip_position_;
    Options options_;
};

// Override when present, else the network metric between the endpoints.
// Throws UnknownId for unresolved endpoints and InvalidArgument for zero distance.
double effective_distance(const Link& link, const Network& network);

// medium_time(effective distance) + jitter draw; never below the vacuum light time.
double propagation_delay(const Link& link, const Network& network, std::uint64_t draw_index);

// =============================================================================
// Shipped networks
// =============================================================================

namespace us_equities_sites {
inline constexpr ExchangeId kMahwah = 1;
inline constexpr ExchangeId kCarteret = 2;
inline constexpr ExchangeId kSecaucus = 3;
inline constexpr ExchangeId kWeehawken = 4;
inline constexpr ExchangeId kAurora = 5;
}  // namespace us_equities_sites

// Five data-center clusters with the published pairwise distances pinned as
// overrides on fiber links. SIP at Mahwah; Weehawken reaches it via the
// default fiber policy.
Network us_equities_network();

}  // namespace esim
