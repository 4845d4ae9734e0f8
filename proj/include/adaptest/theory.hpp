#pragma once

#include "adaptest/common.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace adaptest {

// Closed-form theoretical quantities.  All logarithms are natural.

// B(C,M) = sqrt( (M^(C^2)-1)/M + (2/(M(sqrt2 -1))) C^2 (log M) M^(C^2/sqrt2) ),
// the average-power bound for the Gaussian sequence construction; goes to 0
// as M grows whenever C < 1.
double lemma_bound(double C, std::int64_t M);

// C * (n / log log n)^(-beta/(2 beta + 1)); requires n >= 16, beta in (0,1].
double rate_bound(std::int64_t n, double beta, double C);

// sup over the supplied beta grid of
//   (sqrt(2) sigma_sup 2 K^(3/2))^(2/(2+1/beta)) 2^(2/(2 beta+1)) L^(1/(2 beta+1)),
// where 2/K lower-bounds (F_X(t)-F_X(-t))/t near 0.
double cstar_constant(double sigma_sup, double K, double L,
                      std::span<const double> beta_grid);

// 512 geometrically spaced points from 0.01 to 1; the analytic sup may sit at
// the open left endpoint, so the grid floor is part of the contract.
std::vector<double> default_beta_grid();

// True iff |f(x) - f(x')| <= L |x - x'|^beta for every grid pair, with a
// few-ulp allowance for evaluation rounding.
bool holder_certify(const std::function<double(double)>& f, double beta, double L,
                    std::span<const double> grid);

// ---------------------------------------------------------------------------
// Gaussian sequence model for the average-power bound experiment.

struct LemmaConfig {
    std::size_t n_coords = 0; // N
    int m_lo = 1;             // underline M
    int m_hi = 1;             // overline M
    double mean_bound_c = 0.0;
    std::vector<double> sdev;               // s_i, length N
    std::vector<std::vector<double>> means; // means[j][i] = m_{i, 2^(m_lo+j)}

    int m_count() const { return m_hi - m_lo + 1; }
    std::int64_t k_of(int j) const { return std::int64_t(1) << (m_lo + j); }

    // Checks the support condition (m_{i,k} = 0 for i > k) and the mean
    // bound |m_{i,k}/s_i| <= C sqrt(log M)/sqrt(k); throws naming the cell.
    void validate() const;

    // Saturates the mean bound: m_{i,k} = C s_i sqrt(log M)/sqrt(k), i <= k.
    static LemmaConfig extremal(std::size_t N, int m_lo, int m_hi, double C,
                                std::vector<double> sdev);
};

// A test maps the N observed coordinates to a rejection probability.
using GaussianTest = std::function<double(std::span<const double>)>;

// Likelihood-ratio test of P_0 against the uniform mixture of the
// alternatives: rejects when the mixture likelihood ratio exceeds 1.
GaussianTest make_lr_mixture_test(const LemmaConfig& config);

struct LemmaGapResult {
    double gap = 0.0;   // mean_j power_j - size
    double bound = 0.0; // B(C, M)
    double mc_se = 0.0; // combined MC standard error of the gap
    double size = 0.0;
    std::vector<double> power_per_alt;
};

LemmaGapResult lemma_power_gap(const LemmaConfig& config, const GaussianTest& test,
                               std::size_t reps, std::uint64_t seed,
                               unsigned workers = 1);

} // namespace adaptest
