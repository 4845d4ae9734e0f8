#include "adaptest/kernels.hpp"

#include <limits>

// Reference implementations.  The SIMD backends must reproduce these
// bit for bit; keep the arithmetic sequence here in sync with them.

namespace adaptest::kernels::detail {

double max_sqrtk_gap_scalar(const double* a, const double* b, double sub,
                            std::size_t k_lo, std::size_t k_hi) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double kd = static_cast<double>(k);
        const double num = b ? (a[k] - b[k]) : a[k];
        const double term = std::sqrt(kd) * (num / kd - sub);
        if (term > best)
            best = term;
    }
    return best + 0.0; // normalize -0 to +0
}

double pi_candidate_max_scalar(const double* p, std::size_t n, double pi0) {
    const double nd = static_cast<double>(n);
    // lambda = 0 candidate: cnt = #{p_i > 0}.
    std::size_t zeros = 0;
    while (zeros < n && p[zeros] == 0.0)
        ++zeros;
    double best = pi_candidate_value(nd, pi0, 0.0, static_cast<double>(n - zeros));
    // Order-statistic candidates.  Using cnt = n-1-i at every index (not
    // just the last index of a tie block) only ever undervalues a tied
    // candidate, and the last index of each block carries the exact count,
    // so the running max is exact.
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] >= 1.0)
            break;
        const double v = pi_candidate_value(nd, pi0, p[i], static_cast<double>(n - 1 - i));
        if (v > best)
            best = v;
    }
    return best + 0.0;
}

} // namespace adaptest::kernels::detail
