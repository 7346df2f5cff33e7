#include "esim/kernels.hpp"

namespace esim::kernels {

namespace {

struct KernelTable {
    SimdLevel level;
    void (*boost_events)(const LorentzBoost&, EventColumnsView, EventColumnsSpan);
    void (*boosted_times)(const LorentzBoost&, EventColumnsView, std::span<double>);
    void (*interval_squared)(EventColumnsView, EventColumnsView, std::span<double>);
};

KernelTable select() {
    if (avx2::available()) {
        return {SimdLevel::Avx2, avx2::boost_events, avx2::boosted_times, avx2::interval_squared};
    }
    if (neon::available()) {
        return {SimdLevel::Neon, neon::boost_events, neon::boosted_times, neon::interval_squared};
    }
    return {SimdLevel::Scalar, scalar::boost_events, scalar::boosted_times,
            scalar::interval_squared};
}

const KernelTable& table() {
    static const KernelTable t = select();
    return t;
}

}  // namespace

SimdLevel detected_simd_level() { return table().level; }

void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out) {
    table().boost_events(boost, in, out);
}

void boosted_times(const LorentzBoost& boost, EventColumnsView in, std::span<double> t_out) {
    table().boosted_times(boost, in, t_out);
}

void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out) {
    table().interval_squared(a, b, out);
}

}  // namespace esim::kernels
