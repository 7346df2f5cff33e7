#pragma once

// Physical constants in simulation units: kilometres and microseconds.

namespace esim::phys {

inline constexpr double kSpeedOfLight = 0.299792458;      // km/us, exact
inline constexpr double kSpeedOfLightSi = 299792458.0;    // m/s, exact
inline constexpr double kSurfaceGravity = 9.80665;        // m/s^2, standard gravity
inline constexpr double kEarthRadiusKm = 6371.0;          // spherical Earth

inline constexpr double kSpeedOfLightSquared = kSpeedOfLight * kSpeedOfLight;

}  // namespace esim::phys
