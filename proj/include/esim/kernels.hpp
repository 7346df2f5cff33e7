#pragma once

// Batch Minkowski kernels over structure-of-arrays event columns.
//
// Every kernel has a scalar reference in `kernels::scalar`; SIMD variants
// (`kernels::avx2`, `kernels::neon`) must produce bit-identical results and
// are selected at runtime by the unqualified entry points.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "esim/spacetime.hpp"

namespace esim::kernels {

struct EventColumnsView {
    std::span<const double> t;
    std::span<const double> x;
    std::span<const double> y;
    std::span<const double> z;

    std::size_t size() const noexcept { return t.size(); }
};

struct EventColumnsSpan {
    std::span<double> t;
    std::span<double> x;
    std::span<double> y;
    std::span<double> z;

    std::size_t size() const noexcept { return t.size(); }
};

// Owning SoA storage.
struct EventColumns {
    std::vector<double> t, x, y, z;

    EventColumns() = default;
    explicit EventColumns(std::size_t n) : t(n), x(n), y(n), z(n) {}
    explicit EventColumns(std::span<const SpacetimeEvent> events);

    std::size_t size() const noexcept { return t.size(); }
    EventColumnsView view() const { return {t, x, y, z}; }
    EventColumnsSpan span() { return {t, x, y, z}; }
};

enum class SimdLevel { Scalar, Avx2, Neon };

std::string_view to_string(SimdLevel level);

// Best level supported by this CPU and build.
SimdLevel detected_simd_level();

// ---- dispatched entry points ------------------------------------------------

// Full Lorentz transform of every event. Output may not alias input.
void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out);

// Boosted coordinate time only.
void boosted_times(const LorentzBoost& boost, EventColumnsView in, std::span<double> t_out);

// Pairwise s^2 between a[i] and b[i].
void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out);

// ---- per-ISA implementations --------------------------------------------------

namespace scalar {
void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out);
void boosted_times(const LorentzBoost& boost, EventColumnsView in, std::span<double> t_out);
void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out);
}  // namespace scalar

namespace avx2 {
bool available();
void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out);
void boosted_times(const LorentzBoost& boost, EventColumnsView in, std::span<double> t_out);
void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out);
}  // namespace avx2

namespace neon {
bool available();
void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out);
void boosted_times(const LorentzBoost& boost, EventColumnsView in, std::span<double> t_out);
void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out);
}  // namespace neon

}  // namespace esim::kernels
