// AVX2 variants. Compiled with per-function target attributes so the rest of
// the library keeps the baseline ISA; callers must check avx2::available().

#include <cassert>

#include "esim/kernels.hpp"
#include "boost_math.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define ESIM_HAVE_X86 1
#include <immintrin.h>
#else
#define ESIM_HAVE_X86 0
#endif

namespace esim::kernels::avx2 {

#if ESIM_HAVE_X86

#define ESIM_AVX2 __attribute__((target("avx2")))

bool available() { return __builtin_cpu_supports("avx2"); }

namespace {

constexpr std::size_t kLanes = 4;

ESIM_AVX2 inline __m256d load(std::span<const double> s, std::size_t i) {
    return _mm256_loadu_pd(s.data() + i);
}

}  // namespace

ESIM_AVX2 void boost_events(const LorentzBoost& boost, EventColumnsView in, EventColumnsSpan out) {
    assert(out.size() >= in.size());
    if (boost.is_identity()) {
        scalar::boost_events(boost, in, out);
        return;
    }
    const detail::BoostCoefficients c(boost);
    const __m256d vx = _mm256_set1_pd(c.vx);
    const __m256d vy = _mm256_set1_pd(c.vy);
    const __m256d vz = _mm256_set1_pd(c.vz);
    const __m256d gamma = _mm256_set1_pd(c.gamma);
    const __m256d k = _mm256_set1_pd(c.k);
    const __m256d inv_c2 = _mm256_set1_pd(c.inv_c2);

    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d t = load(in.t, i);
        const __m256d x = load(in.x, i);
        const __m256d y = load(in.y, i);
        const __m256d z = load(in.z, i);
        const __m256d vdotx = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(vx, x), _mm256_mul_pd(vy, y)), _mm256_mul_pd(vz, z));
        const __m256d shift = _mm256_sub_pd(_mm256_mul_pd(k, vdotx), _mm256_mul_pd(gamma, t));
        const __m256d tp = _mm256_mul_pd(gamma, _mm256_sub_pd(t, _mm256_mul_pd(vdotx, inv_c2)));
        _mm256_storeu_pd(out.t.data() + i, tp);
        _mm256_storeu_pd(out.x.data() + i, _mm256_add_pd(x, _mm256_mul_pd(shift, vx)));
        _mm256_storeu_pd(out.y.data() + i, _mm256_add_pd(y, _mm256_mul_pd(shift, vy)));
        _mm256_storeu_pd(out.z.data() + i, _mm256_add_pd(z, _mm256_mul_pd(shift, vz)));
    }
    for (; i < n; ++i) {
        const auto p = detail::boost_point(c, in.t[i], in.x[i], in.y[i], in.z[i]);
        out.t[i] = p.t;
        out.x[i] = p.x;
        out.y[i] = p.y;
        out.z[i] = p.z;
    }
}

ESIM_AVX2 void boosted_times(const LorentzBoost& boost, EventColumnsView in,
                             std::span<double> t_out) {
    assert(t_out.size() >= in.size());
    if (boost.is_identity()) {
        scalar::boosted_times(boost, in, t_out);
        return;
    }
    const detail::BoostCoefficients c(boost);
    const __m256d vx = _mm256_set1_pd(c.vx);
    const __m256d vy = _mm256_set1_pd(c.vy);
    const __m256d vz = _mm256_set1_pd(c.vz);
    const __m256d gamma = _mm256_set1_pd(c.gamma);
    const __m256d inv_c2 = _mm256_set1_pd(c.inv_c2);

    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d vdotx = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(vx, load(in.x, i)), _mm256_mul_pd(vy, load(in.y, i))),
            _mm256_mul_pd(vz, load(in.z, i)));
        const __m256d tp =
            _mm256_mul_pd(gamma, _mm256_sub_pd(load(in.t, i), _mm256_mul_pd(vdotx, inv_c2)));
        _mm256_storeu_pd(t_out.data() + i, tp);
    }
    for (; i < n; ++i) t_out[i] = detail::boosted_time(c, in.t[i], in.x[i], in.y[i], in.z[i]);
}

ESIM_AVX2 void interval_squared(EventColumnsView a, EventColumnsView b, std::span<double> out) {
    assert(a.size() == b.size() && out.size() >= a.size());
    const __m256d c = _mm256_set1_pd(phys::kSpeedOfLight);
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d cdt = _mm256_mul_pd(c, _mm256_sub_pd(load(b.t, i), load(a.t, i)));
        const __m256d dx = _mm256_sub_pd(load(b.x, i), load(a.x, i));
        const __m256d dy = _mm256_sub_pd(load(b.y, i), load(a.y, i));
        const __m256d dz = _mm256_sub_pd(load(b.z, i), load(a.z, i));
        const __m256d r2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                         _mm256_mul_pd(dz, dz));
        _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(_mm256_mul_pd(cdt, cdt), r2));
    }
    for (; i < n; ++i) {
        out[i] = detail::interval_squared(a.t[i], a.x[i], a.y[i], a.z[i], b.t[i], b.x[i], b.y[i],
                                          b.z[i]);
    }
}

#else  // !ESIM_HAVE_X86

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

}  // namespace esim::kernels::avx2
