#pragma once

// Element-wise formulas shared by the scalar reference and spacetime.cpp.
// The SIMD kernels replicate the same operation order so results match bitwise.

#include "esim/constants.hpp"
#include "esim/spacetime.hpp"

namespace esim::detail {

struct BoostCoefficients {
    double vx, vy, vz;
    double gamma;
    double k;       // (gamma - 1) / |v|^2
    double inv_c2;

    explicit BoostCoefficients(const LorentzBoost& b)
        : vx(b.velocity().x), vy(b.velocity().y), vz(b.velocity().z), gamma(b.gamma()),
          k(b.is_identity() ? 0.0 : (b.gamma() - 1.0) / b.velocity().norm2()),
          inv_c2(1.0 / phys::kSpeedOfLightSquared) {}
};

struct BoostedPoint {
    double t, x, y, z;
};

inline double boosted_time(const BoostCoefficients& c, double t, double x, double y, double z) {
    const double vdotx = c.vx * x + c.vy * y + c.vz * z;
    return c.gamma * (t - vdotx * c.inv_c2);
}

inline BoostedPoint boost_point(const BoostCoefficients& c, double t, double x, double y,
                                double z) {
    const double vdotx = c.vx * x + c.vy * y + c.vz * z;
    const double shift = c.k * vdotx - c.gamma * t;
    return {c.gamma * (t - vdotx * c.inv_c2), x + shift * c.vx, y + shift * c.vy,
            z + shift * c.vz};
}

inline double interval_squared(double ta, double xa, double ya, double za, double tb, double xb,
                               double yb, double zb) {
    const double cdt = phys::kSpeedOfLight * (tb - ta);
    const double dx = xb - xa;
    const double dy = yb - ya;
    const double dz = zb - za;
    return cdt * cdt - ((dx * dx + dy * dy) + dz * dz);
}

}  // namespace esim::detail
