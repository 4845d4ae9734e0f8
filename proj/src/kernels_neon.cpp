#if defined(__aarch64__) && defined(__ARM_NEON)

#include "adaptest/kernels.hpp"

#include <arm_neon.h>
#include <limits>

// NEON (AArch64) variants; same per-lane arithmetic as the scalar
// reference, two lanes at a time.

namespace adaptest::kernels::detail {

double max_sqrtk_gap_neon(const double* a, const double* b, double sub,
                          std::size_t k_lo, std::size_t k_hi) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t k = k_lo;
    if (k_hi >= k_lo && k_hi - k_lo + 1 >= 4) {
        const float64x2_t subv = vdupq_n_f64(sub);
        float64x2_t bestv = vdupq_n_f64(best);
        float64x2_t kv = {static_cast<double>(k), static_cast<double>(k + 1)};
        const float64x2_t two = vdupq_n_f64(2.0);
        for (; k + 1 <= k_hi; k += 2) {
            float64x2_t num = vld1q_f64(a + k);
            if (b)
                num = vsubq_f64(num, vld1q_f64(b + k));
            const float64x2_t m = vsubq_f64(vdivq_f64(num, kv), subv);
            const float64x2_t term = vmulq_f64(vsqrtq_f64(kv), m);
            bestv = vmaxq_f64(bestv, term);
            kv = vaddq_f64(kv, two);
        }
        best = vmaxvq_f64(bestv);
    }
    for (; k <= k_hi; ++k) {
        const double kd = static_cast<double>(k);
        const double num = b ? (a[k] - b[k]) : a[k];
        const double term = std::sqrt(kd) * (num / kd - sub);
        if (term > best)
            best = term;
    }
    return best + 0.0;
}

double pi_candidate_max_neon(const double* p, std::size_t n, double pi0) {
    const double nd = static_cast<double>(n);
    std::size_t zeros = 0;
    while (zeros < n && p[zeros] == 0.0)
        ++zeros;
    double best = pi_candidate_value(nd, pi0, 0.0, static_cast<double>(n - zeros));

    std::size_t i = 0;
    if (n >= 4) {
        const float64x2_t one = vdupq_n_f64(1.0);
        const float64x2_t ndv = vdupq_n_f64(nd);
        const float64x2_t pi0v = vdupq_n_f64(pi0);
        const float64x2_t neginf = vdupq_n_f64(-std::numeric_limits<double>::infinity());
        float64x2_t bestv = neginf;
        float64x2_t cntv = {nd - 1.0, nd - 2.0};
        const float64x2_t two = vdupq_n_f64(2.0);
        for (; i + 1 < n; i += 2) {
            const float64x2_t pv = vld1q_f64(p + i);
            const uint64x2_t mask = vcltq_f64(pv, one);
            if (vgetq_lane_u64(mask, 0) == 0 && vgetq_lane_u64(mask, 1) == 0)
                break;
            const float64x2_t s = vsqrtq_f64(vmulq_f64(ndv, vsubq_f64(one, pv)));
            const float64x2_t v = vsubq_f64(vmulq_f64(s, pi0v), vdivq_f64(cntv, s));
            bestv = vmaxq_f64(bestv, vbslq_f64(mask, v, neginf));
            cntv = vsubq_f64(cntv, two);
        }
        const double blockmax = vmaxvq_f64(bestv);
        if (blockmax > best)
            best = blockmax;
    }
    for (; i < n; ++i) {
        if (p[i] >= 1.0)
            break;
        const double v = pi_candidate_value(nd, pi0, p[i], static_cast<double>(n - 1 - i));
        if (v > best)
            best = v;
    }
    return best + 0.0;
}

} // namespace adaptest::kernels::detail

#endif // aarch64 NEON
