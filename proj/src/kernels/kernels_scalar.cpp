#include <algorithm>
#include <cassert>

#include "esim/kernels.hpp"
#include "boost_math.hpp"

namespace esim::kernels {

EventColumns::EventColumns(std::span<const SpacetimeEvent> events) : EventColumns(events.size()) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        t[i] = events[i].t;
        x[i] = events[i].x.x;
        y[i] = events[i].x.y;
        z[i] = events[i].x.z;
    }
}

std::string_view to_string(SimdLevel level) {
    switch (level) {
        case SimdLevel::Scalar: return "scalar";
        case SimdLevel::Avx2: return "avx2";
        case SimdLevel::Neon: return "neon";
    }
    return "?";
}

namespace scalar {

void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out) {
    assert(out.size() >= in.size());
    const std::size_t n = in.size();
    if (boost.is_identity()) {
        std::copy_n(in.t.begin(), n, out.t.begin());
        std::copy_n(in.x.begin(), n, out.x.begin());
        std::copy_n(in.y.begin(), n, out.y.begin());
        std::copy_n(in.z.begin(), n, out.z.begin());
        return;
    }
    const detail::BoostCoefficients c(boost);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = detail::boost_point(c, in.t[i], in.x[i], in.y[i], in.z[i]);
        out.t[i] = p.t;
        out.x[i] = p.x;
        out.y[i] = p.y;
        out.z[i] = p.z;
    }
}

void boosted_times(const LorentzBoost& boost, EventColumnsView in, std::span<double> t_out) {
    assert(t_out.size() >= in.size());
    const std::size_t n = in.size();
    if (boost.is_identity()) {
        std::copy_n(in.t.begin(), n, t_out.begin());
        return;
    }
    const detail::BoostCoefficients c(boost);
    for (std::size_t i = 0; i < n; ++i) {
        t_out[i] = detail::boosted_time(c, in.t[i], in.x[i], in.y[i], in.z[i]);
    }
}

void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out) {
    assert(a.size() == b.size() && out.size() >= a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = detail::interval_squared(a.t[i], a.x[i], a.y[i], a.z[i], b.t[i], b.x[i], b.y[i],
                                          b.z[i]);
    }
}

}  // namespace scalar
}  // namespace esim::kernels
