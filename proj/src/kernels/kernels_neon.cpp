// NEON variants for AArch64, two doubles per lane group.

#include <cassert>

#include "esim/kernels.hpp"
#include "boost_math.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#define ESIM_HAVE_NEON 1
#include <arm_neon.h>
#else
#define ESIM_HAVE_NEON 0
#endif

namespace esim::kernels::neon {

#if ESIM_HAVE_NEON

// Advanced SIMD is mandatory on AArch64.
bool available() { return true; }

void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out) {
    assert(out.size() >= in.size());
    if (boost.is_identity()) {
        scalar::boost_events(boost, in, out);
        return;
    }
    const detail::BoostCoefficients c(boost);
    const float64x2_t vx = vdupq_n_f64(c.vx);
    const float64x2_t vy = vdupq_n_f64(c.vy);
    const float64x2_t vz = vdupq_n_f64(c.vz);
    const float64x2_t gamma = vdupq_n_f64(c.gamma);
    const float64x2_t k = vdupq_n_f64(c.k);
    const float64x2_t inv_c2 = vdupq_n_f64(c.inv_c2);

    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t t = vld1q_f64(in.t.data() + i);
        const float64x2_t x = vld1q_f64(in.x.data() + i);
        const float64x2_t y = vld1q_f64(in.y.data() + i);
        const float64x2_t z = vld1q_f64(in.z.data() + i);
        // vmulq/vaddq only: fused multiply-add would break bitwise parity with scalar.
        const float64x2_t vdotx =
            vaddq_f64(vaddq_f64(vmulq_f64(vx, x), vmulq_f64(vy, y)), vmulq_f64(vz, z));
        const float64x2_t shift = vsubq_f64(vmulq_f64(k, vdotx), vmulq_f64(gamma, t));
        vst1q_f64(out.t.data() + i, vmulq_f64(gamma, vsubq_f64(t, vmulq_f64(vdotx, inv_c2))));
        vst1q_f64(out.x.data() + i, vaddq_f64(x, vmulq_f64(shift, vx)));
        vst1q_f64(out.y.data() + i, vaddq_f64(y, vmulq_f64(shift, vy)));
        vst1q_f64(out.z.data() + i, vaddq_f64(z, vmulq_f64(shift, vz)));
    }
    for (; i < n; ++i) {
        const auto p = detail::boost_point(c, in.t[i], in.x[i], in.y[i], in.z[i]);
        out.t[i] = p.t;
        out.x[i] = p.x;
        out.y[i] = p.y;
        out.z[i] = p.z;
    }
}

void boosted_times(const LorentzBoost& boost, EventColumnsView in, std::span<double> t_out) {
    assert(t_out.size() >= in.size());
    if (boost.is_identity()) {
        scalar::boosted_times(boost, in, t_out);
        return;
    }
    const detail::BoostCoefficients c(boost);
    const float64x2_t vx = vdupq_n_f64(c.vx);
    const float64x2_t vy = vdupq_n_f64(c.vy);
    const float64x2_t vz = vdupq_n_f64(c.vz);
    const float64x2_t gamma = vdupq_n_f64(c.gamma);
    const float64x2_t inv_c2 = vdupq_n_f64(c.inv_c2);

    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vdotx =
            vaddq_f64(vaddq_f64(vmulq_f64(vx, vld1q_f64(in.x.data() + i)),
                                vmulq_f64(vy, vld1q_f64(in.y.data() + i))),
                      vmulq_f64(vz, vld1q_f64(in.z.data() + i)));
        const float64x2_t t = vld1q_f64(in.t.data() + i);
        vst1q_f64(t_out.data() + i, vmulq_f64(gamma, vsubq_f64(t, vmulq_f64(vdotx, inv_c2))));
    }
    for (; i < n; ++i) t_out[i] = detail::boosted_time(c, in.t[i], in.x[i], in.y[i], in.z[i]);
}

void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out) {
    assert(a.size() == b.size() && out.size() >= a.size());
    const float64x2_t c = vdupq_n_f64(phys::kSpeedOfLight);
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t cdt =
            vmulq_f64(c, vsubq_f64(vld1q_f64(b.t.data() + i), vld1q_f64(a.t.data() + i)));
        const float64x2_t dx = vsubq_f64(vld1q_f64(b.x.data() + i), vld1q_f64(a.x.data() + i));
        const float64x2_t dy = vsubq_f64(vld1q_f64(b.y.data() + i), vld1q_f64(a.y.data() + i));
        const float64x2_t dz = vsubq_f64(vld1q_f64(b.z.data() + i), vld1q_f64(a.z.data() + i));
        const float64x2_t r2 =
            vaddq_f64(vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)), vmulq_f64(dz, dz));
        vst1q_f64(out.data() + i, vsubq_f64(vmulq_f64(cdt, cdt), r2));
    }
    for (; i < n; ++i) {
        out[i] = detail::interval_squared(a.t[i], a.x[i], a.y[i], a.z[i], b.t[i], b.x[i], b.y[i],
                                          b.z[i]);
    }
}

#else  // !ESIM_HAVE_NEON

bool available() { return false; }

void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out) {
    scalar::boost_events(boost, in, out);
}
void boosted_times(const LorentzBoost& boost, EventColumnsView in, std::span<double> t_out) {
    scalar::boosted_times(boost, in, t_out);
}
void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out) {
    scalar::interval_squared(a, b, out);
}

#endif

}  // namespace esim::kernels::neon
