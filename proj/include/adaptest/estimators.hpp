#pragma once

#include "adaptest/dgp.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace adaptest {

// k-NN estimator of g(0) and the scan statistics built on it.  The "trace"
// entry points report per-k diagnostics; the *_value entry points are the
// allocation-light equivalents used inside Monte-Carlo loops and go through
// the dispatched kernels.  Both compute identical (bit for bit) values.

struct KnnTrace {
    std::vector<double> gk; // gk[k-1] = khat_k; zero beyond kbar
    std::size_t kbar = 0;   // largest k with |X_(k)| < eta
    std::size_t k_argmax = 0; // 1-based k attaining the statistic; 0 if unset
};

// Mean of the y-values of the k nearest-by-|x| observations when
// |X_(k)| < eta, 0 otherwise.  Ties in |x| are broken by the fixed total
// order (|x| asc, x asc, input index asc); exactly k terms are averaged.
double knn_estimate(const Sample& s, std::size_t k, double eta);

struct TnResult {
    double value = 0.0;
    KnnTrace trace;
};

// T_n(theta0) = max_{1<=k<=n} term_k with term_k = sqrt(k) (ghat_k - theta0)
// for k <= kbar and exactly 0 for k > kbar.
TnResult tn_statistic(const Sample& s, double theta0, double eta);

struct RdResult {
    double value = 0.0;
    KnnTrace left;  // X <= 0 side
    KnnTrace right; // X > 0 side
    std::size_t k_argmax = 0;
};

// T_n^rd(tau) = max_{1<=k<=min(n1,n2)} sqrt(k) (ghat_{2,k} - ghat_{1,k} - tau_k)
// with the tau term included only when k <= kbar on both sides.
RdResult rd_statistic(const Sample& s, double tau, double eta);

// pi_hat(lambda) = #{p_i > lambda} / (n (1 - lambda)), strict inequality.
double storey_estimate(std::span<const double> pvals, double lambda);

struct PiResult {
    double value = 0.0;
    double lambda_argmax = 0.0;
};

// T_n(pi0) = max_{0<=lambda<1} sqrt(n (1-lambda)) [pi0 - pi_hat(lambda)],
// computed exactly over the candidate set {0} union {p_(i) : p_(i) < 1}:
// on each interval where the exceedance count is constant the objective is
// decreasing in lambda, so the left endpoints attain the maximum.
PiResult pi_statistic(std::span<const double> pvals, double pi0);

// ---------------------------------------------------------------------------
// Hot paths.

struct TnScratch {
    std::vector<std::uint32_t> idx;
    std::vector<double> prefix;
};

// Value of tn_statistic on raw arrays; bit-identical to the trace path.
double tn_value(std::span<const double> x, std::span<const double> y, double theta0,
                double eta, TnScratch& scratch);

struct RdScratch {
    std::vector<std::uint32_t> idx;
    std::vector<double> prefix_left, prefix_right, neg;
};

double rd_value(std::span<const double> x, std::span<const double> y, double tau,
                double eta, RdScratch& scratch);

// Value of pi_statistic for already-sorted p-values (ascending).
double pi_value_sorted(std::span<const double> sorted_pvals, double pi0);

} // namespace adaptest
