#include "esim/spacetime.hpp"

#include <algorithm>
#include <string>

#include "esim/error.hpp"
#include "../kernels/boost_math.hpp"

namespace esim {

std::string_view to_string(IntervalClass c) {
    switch (c) {
        case IntervalClass::Timelike: return "timelike";
        case IntervalClass::Spacelike: return "spacelike";
        case IntervalClass::Lightlike: return "lightlike";
    }
    return "?";
}

std::string_view to_string(FrameOrder o) {
    switch (o) {
        case FrameOrder::ABeforeB: return "a-before-b";
        case FrameOrder::BBeforeA: return "b-before-a";
        case FrameOrder::Indistinguishable: return "indistinguishable";
    }
    return "?";
}

LorentzBoost::LorentzBoost(Vec3 velocity_km_per_us) : v_(velocity_km_per_us) {
    if (!v_.finite()) throw InvalidArgument("boost velocity must be finite");
    speed_ = v_.norm();
    const double beta = speed_ / phys::kSpeedOfLight;
    if (!(beta < 1.0)) {
        throw InvalidArgument("boost speed " + std::to_string(beta) +
                              "c is not below the speed of light");
    }
    // (1 - b)(1 + b) keeps precision as b -> 1.
    gamma_ = speed_ == 0.0 ? 1.0 : 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
}

LorentzBoost LorentzBoost::along(Vec3 direction, double speed_km_per_us) {
    const double n = direction.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw InvalidArgument("boost direction must be a finite non-zero vector");
    }
    return LorentzBoost(direction * (speed_km_per_us / n));
}

double interval_squared(const SpacetimeEvent& a, const SpacetimeEvent& b) {
    return detail::interval_squared(a.t, a.x.x, a.x.y, a.x.z, b.t, b.x.x, b.x.y, b.x.z);
}

IntervalClass classify(const SpacetimeEvent& a, const SpacetimeEvent& b, double epsilon_km2) {
    if (!(epsilon_km2 >= 0.0)) throw InvalidArgument("classification epsilon must be >= 0");
    // Symmetric by construction: dt and dx enter squared.
    const double s2 = interval_squared(a, b);
    if (s2 < -epsilon_km2) return IntervalClass::Spacelike;
    if (s2 > epsilon_km2) return IntervalClass::Timelike;
    return IntervalClass::Lightlike;
}

SpacetimeEvent boost_event(const LorentzBoost& boost, const SpacetimeEvent& e) {
    if (boost.is_identity()) return e;
    const detail::BoostCoefficients c(boost);
    const auto p = detail::boost_point(c, e.t, e.x.x, e.x.y, e.x.z);
    return {e.id, {p.x, p.y, p.z}, p.t};
}

FrameOrder ordering_in_frame(const SpacetimeEvent& a, const SpacetimeEvent& b,
                             const LorentzBoost& boost, double tolerance_us) {
    double ta = a.t;
    double tb = b.t;
    if (!boost.is_identity()) {
        const detail::BoostCoefficients c(boost);
        ta = detail::boosted_time(c, a.t, a.x.x, a.x.y, a.x.z);
        tb = detail::boosted_time(c, b.t, b.x.x, b.x.y, b.x.z);
    }
    if (std::abs(ta - tb) <= tolerance_us) return FrameOrder::Indistinguishable;
    return ta < tb ? FrameOrder::ABeforeB : FrameOrder::BBeforeA;
}

LorentzBoost flip_boost(const SpacetimeEvent& a, const SpacetimeEvent& b, double margin) {
    if (!(margin > 0.0 && margin < 1.0)) throw InvalidArgument("flip margin must lie in (0, 1)");
    if (classify(a, b) != IntervalClass::Spacelike) {
        throw NotSpacelike("events " + std::to_string(a.id) + " and " + std::to_string(b.id) +
                           " are not spacelike separated (|dt| >= d/c); their order is "
                           "absolute and no inertial frame reverses it");
    }
    constexpr double c = phys::kSpeedOfLight;
    const Vec3 dx = b.x - a.x;
    const double dist = dx.norm();
    const double dt = b.t - a.t;
    const double adt = std::abs(dt);

    // Sign change of t'_b - t'_a = gamma (dt - s |dx| / c^2) needs s beyond this.
    const double threshold = c * c * adt / dist;
    double speed = adt == 0.0 ? margin * c : threshold * (1.0 + margin);
    // Reversed separation must clear the ordering tolerance (gamma >= 1 only helps).
    speed = std::max(speed, c * c * (adt + 2.0 * kDefaultOrderTolerance) / dist);
    const double cap = c * kMaxBoostFraction;
    if (speed >= cap) speed = threshold < cap ? cap : threshold + 0.5 * (c - threshold);

    // Positive speed along dx pushes b earlier; used when a is not later than b.
    const LorentzBoost boost = LorentzBoost::along(dt >= 0.0 ? dx : -dx, speed);
    const FrameOrder before = ordering_in_frame(a, b, LorentzBoost{});
    const FrameOrder after = ordering_in_frame(a, b, boost);
    if (after == before || after == FrameOrder::Indistinguishable) {
        throw NotSpacelike("pair " + std::to_string(a.id) + "/" + std::to_string(b.id) +
                           " sits too close to the light cone to reverse within tolerance");
    }
    return boost;
}

double light_time(double distance_km) {
    if (!(distance_km >= 0.0)) throw InvalidArgument("distance must be >= 0");
    return distance_km / phys::kSpeedOfLight;
}

double medium_time(double distance_km, double refractive_index) {
    if (!(distance_km >= 0.0)) throw InvalidArgument("distance must be >= 0");
    if (!(refractive_index >= 1.0)) throw InvalidArgument("refractive index must be >= 1");
    return distance_km * refractive_index / phys::kSpeedOfLight;
}

double gravitational_rate(double altitude_m) {
    if (!(std::abs(altitude_m) <= 10'000.0)) {
        throw InvalidArgument("altitude " + std::to_string(altitude_m) +
                              " m is outside the +/-10 km first-order regime");
    }
    return 1.0 + phys::kSurfaceGravity * altitude_m /
                     (phys::kSpeedOfLightSi * phys::kSpeedOfLightSi);
}

}  // namespace esim
