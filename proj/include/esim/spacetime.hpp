#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "esim/constants.hpp"

namespace esim {

// =============================================================================
// Vec3 - lab-frame position or velocity (km, km/us)
// =============================================================================
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

    constexpr bool operator==(const Vec3&) const = default;
};

using EventId = std::uint64_t;

// A point in spacetime, lab frame. Position in km, coordinate time in us.
struct SpacetimeEvent {
    EventId id = 0;
    Vec3 x;
    double t = 0.0;

    bool operator==(const SpacetimeEvent&) const = default;
};

enum class IntervalClass { Timelike, Spacelike, Lightlike };

enum class FrameOrder { ABeforeB, BBeforeA, Indistinguishable };

std::string_view to_string(IntervalClass c);
std::string_view to_string(FrameOrder o);

inline constexpr double kDefaultLightconeEpsilon = 1e-6;   // km^2
inline constexpr double kDefaultOrderTolerance = 1e-6;     // us
inline constexpr double kDefaultFlipMargin = 0.01;
inline constexpr double kMaxBoostFraction = 1.0 - 1e-6;    // of c

// =============================================================================
// LorentzBoost - change of inertial frame with velocity v, |v| < c
// =============================================================================
class LorentzBoost {
public:
    // Identity boost.
    LorentzBoost() = default;

    // Throws InvalidArgument unless v is finite and |v| < c.
    explicit LorentzBoost(Vec3 velocity_km_per_us);

    // Boost of the given speed (km/us) along a direction; the direction need not be normalised.
    static LorentzBoost along(Vec3 direction, double speed_km_per_us);

    const Vec3& velocity() const noexcept { return v_; }
    double speed() const noexcept { return speed_; }
    double beta() const noexcept { return speed_ / phys::kSpeedOfLight; }
    double gamma() const noexcept { return gamma_; }
    bool is_identity() const noexcept { return speed_ == 0.0; }

    LorentzBoost inverse() const { return LorentzBoost(-v_); }

    bool operator==(const LorentzBoost& o) const { return v_ == o.v_; }

private:
    Vec3 v_;
    double speed_ = 0.0;
    double gamma_ = 1.0;
};

// s^2 = c^2 dt^2 - |dx|^2 in km^2. Positive is timelike.
double interval_squared(const SpacetimeEvent& a, const SpacetimeEvent& b);

// Spacelike iff s^2 < -epsilon, Timelike iff s^2 > epsilon, else Lightlike.
IntervalClass classify(const SpacetimeEvent& a, const SpacetimeEvent& b,
                       double epsilon_km2 = kDefaultLightconeEpsilon);

SpacetimeEvent boost_event(const LorentzBoost& boost, const SpacetimeEvent& e);

// Coordinate-time order of a and b in the boosted frame.
FrameOrder ordering_in_frame(const SpacetimeEvent& a, const SpacetimeEvent& b,
                             const LorentzBoost& boost,
                             double tolerance_us = kDefaultOrderTolerance);

// Smallest-axis boost that reverses the coordinate order of a spacelike pair.
//
// The boost points along +/-(x_b - x_a) with speed c^2|dt|/|dx| scaled by
// (1 + margin) and capped at c(1 - 1e-6). For simultaneous events the speed is
// margin * c. The speed is raised when needed so the reversed order clears the
// default ordering tolerance. Throws NotSpacelike for timelike/lightlike pairs.
LorentzBoost flip_boost(const SpacetimeEvent& a, const SpacetimeEvent& b,
                        double margin = kDefaultFlipMargin);

// Vacuum light time d/c (us).
double light_time(double distance_km);

// Propagation time through a medium of refractive index n >= 1 (us).
double medium_time(double distance_km, double refractive_index);

// First-order clock rate factor 1 + g h / c^2 relative to sea level.
// Altitude must lie within +/-10 km of sea level.
double gravitational_rate(double altitude_m);

}  // namespace esim
