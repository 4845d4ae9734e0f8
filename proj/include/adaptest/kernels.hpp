#pragma once

#include <cmath>
#include <cstddef>
#include <string>

namespace adaptest::kernels {

// The Monte-Carlo engine evaluates the scan statistics tens of thousands of
// times per critical value, so the two inner loops below exist as scalar
// reference kernels plus SIMD variants (AVX2, NEON) selected at runtime.
// Every variant performs the same per-element arithmetic (no FMA, no
// reassociation of anything but the order-insensitive max), so all backends
// return bit-identical values; the equivalence tests assert exactly that.

// max over k in [k_lo, k_hi] of sqrt(k) * ((a[k] - b[k]) / k - sub).
// a and b are prefix-sum arrays with a[0] == 0, a[k] = sum of the first k
// values; either pointer may be null and is then treated as zero.
// Returns -infinity for an empty range.  A zero result is normalized to +0.
double max_sqrtk_gap(const double* prefix_a, const double* prefix_b,
                     double sub, std::size_t k_lo, std::size_t k_hi);

// Objective value at one candidate lambda = p of the pi0 scan statistic,
// with cnt = #{p_i > lambda}.  Shared by the scalar backend and the
// trace-producing path; the SIMD backends mirror these exact operations.
inline double pi_candidate_value(double n, double pi0, double p, double cnt) {
    const double s = std::sqrt(n * (1.0 - p));
    return s * pi0 - cnt / s;
}

// max over the candidate set {0} union {p_(i) : p_(i) < 1} of the pi0 scan
// objective, for sorted_pvals ascending in [0,1].  Value only (no argmax).
double pi_candidate_max(const double* sorted_pvals, std::size_t n, double pi0);

enum class Backend { scalar, avx2, neon };

Backend active_backend();
const char* backend_name(Backend b);

// Force a backend by name ("scalar", "avx2", "neon", "auto"); throws
// validation_error if the requested backend is unavailable on this CPU.
// The ADAPTEST_KERNELS environment variable does the same at startup.
void force_backend(const std::string& name);

// Detection results, independent of what is currently active.
bool avx2_available();
bool neon_available();

} // namespace adaptest::kernels
