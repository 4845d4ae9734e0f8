#if defined(__x86_64__) || defined(_M_X64)

#include "adaptest/kernels.hpp"

#include <immintrin.h>
#include <limits>

// AVX2 variants.  Per-lane operations mirror the scalar reference exactly
// (sqrt/div/mul/sub only, no FMA), so results are bit-identical; the max
// reduction is order-insensitive for non-NaN inputs.

namespace adaptest::kernels::detail {

namespace {

double hmax4(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    __m128d s = _mm_unpackhi_pd(m, m);
    return _mm_cvtsd_f64(_mm_max_sd(m, s));
}

} // namespace

double max_sqrtk_gap_avx2(const double* a, const double* b, double sub,
                          std::size_t k_lo, std::size_t k_hi) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t k = k_lo;
    if (k_hi >= k_lo && k_hi - k_lo + 1 >= 8) {
        const __m256d subv = _mm256_set1_pd(sub);
        __m256d bestv = _mm256_set1_pd(best);
        __m256d kv = _mm256_setr_pd(static_cast<double>(k), static_cast<double>(k + 1),
                                    static_cast<double>(k + 2), static_cast<double>(k + 3));
        const __m256d four = _mm256_set1_pd(4.0);
        for (; k + 3 <= k_hi; k += 4) {
            __m256d num = _mm256_loadu_pd(a + k);
            if (b)
                num = _mm256_sub_pd(num, _mm256_loadu_pd(b + k));
            const __m256d m = _mm256_sub_pd(_mm256_div_pd(num, kv), subv);
            const __m256d term = _mm256_mul_pd(_mm256_sqrt_pd(kv), m);
            bestv = _mm256_max_pd(bestv, term);
            kv = _mm256_add_pd(kv, four);
        }
        best = hmax4(bestv);
    }
    for (; k <= k_hi && k_hi >= k_lo; ++k) {
        const double kd = static_cast<double>(k);
        const double num = b ? (a[k] - b[k]) : a[k];
        const double term = std::sqrt(kd) * (num / kd - sub);
        if (term > best)
            best = term;
    }
    return best + 0.0;
}

double pi_candidate_max_avx2(const double* p, std::size_t n, double pi0) {
    const double nd = static_cast<double>(n);
    std::size_t zeros = 0;
    while (zeros < n && p[zeros] == 0.0)
        ++zeros;
    double best = pi_candidate_value(nd, pi0, 0.0, static_cast<double>(n - zeros));

    std::size_t i = 0;
    if (n >= 8) {
        const __m256d one = _mm256_set1_pd(1.0);
        const __m256d ndv = _mm256_set1_pd(nd);
        const __m256d pi0v = _mm256_set1_pd(pi0);
        const __m256d neginf = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
        __m256d bestv = neginf;
        __m256d cntv = _mm256_setr_pd(nd - 1.0, nd - 2.0, nd - 3.0, nd - 4.0);
        const __m256d four = _mm256_set1_pd(4.0);
        for (; i + 3 < n; i += 4) {
            const __m256d pv = _mm256_loadu_pd(p + i);
            const __m256d mask = _mm256_cmp_pd(pv, one, _CMP_LT_OQ);
            if (_mm256_movemask_pd(mask) == 0)
                break; // sorted: everything from here on is >= 1
            const __m256d s = _mm256_sqrt_pd(_mm256_mul_pd(ndv, _mm256_sub_pd(one, pv)));
            const __m256d v = _mm256_sub_pd(_mm256_mul_pd(s, pi0v), _mm256_div_pd(cntv, s));
            bestv = _mm256_max_pd(bestv, _mm256_blendv_pd(neginf, v, mask));
            cntv = _mm256_sub_pd(cntv, four);
        }
        const double blockmax = hmax4(bestv);
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

#endif // x86_64
