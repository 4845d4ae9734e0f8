#include "adaptest/theory.hpp"

#include "adaptest/parallel.hpp"
#include "adaptest/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptest {

double lemma_bound(double C, std::int64_t M) {
    if (M < 2)
        throw validation_error("lemma_bound: M must be at least 2");
    if (C < 0.0)
        throw validation_error("lemma_bound: C must be nonnegative");
    const double Md = static_cast<double>(M);
    const double c2 = C * C;
    const double logM = std::log(Md);
    const double t1 = (std::exp(c2 * logM) - 1.0) / Md;
    const double t2 = 2.0 / (Md * (std::sqrt(2.0) - 1.0)) * c2 * logM *
                      std::exp(c2 / std::sqrt(2.0) * logM);
    return std::sqrt(t1 + t2);
}

double rate_bound(std::int64_t n, double beta, double C) {
    if (n < 16)
        throw validation_error("rate_bound: n must be at least 16 so log log n > 0");
    if (!(beta > 0.0) || beta > 1.0)
        throw validation_error("rate_bound: beta must lie in (0,1]");
    const double nd = static_cast<double>(n);
    return C * std::pow(nd / std::log(std::log(nd)), -beta / (2.0 * beta + 1.0));
}

double cstar_constant(double sigma_sup, double K, double L,
                      std::span<const double> beta_grid) {
    if (beta_grid.empty())
        throw validation_error("cstar_constant: beta grid must be nonempty");
    if (!(sigma_sup > 0.0) || !(K > 0.0) || !(L > 0.0))
        throw validation_error("cstar_constant: inputs must be positive");
    const double A = std::sqrt(2.0) * sigma_sup * 2.0 * std::pow(K, 1.5);
    double best = 0.0;
    for (double beta : beta_grid) {
        if (!(beta > 0.0) || beta > 1.0)
            throw validation_error("cstar_constant: beta grid must lie in (0,1]");
        const double term = std::pow(A, 2.0 / (2.0 + 1.0 / beta)) *
                            std::pow(2.0, 2.0 / (2.0 * beta + 1.0)) *
                            std::pow(L, 1.0 / (2.0 * beta + 1.0));
        best = std::max(best, term);
    }
    return best;
}

std::vector<double> default_beta_grid() {
    const int count = 512;
    std::vector<double> grid(count);
    const double lo = 0.01, hi = 1.0;
    for (int i = 0; i < count; ++i)
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    grid.back() = 1.0;
    return grid;
}

bool holder_certify(const std::function<double(double)>& f, double beta, double L,
                    std::span<const double> grid) {
    if (grid.empty())
        throw validation_error("holder_certify: grid must be nonempty");
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        vals[i] = f(grid[i]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const double lhs = std::abs(vals[i] - vals[j]);
            const double rhs = L * std::pow(std::abs(grid[i] - grid[j]), beta);
            // few-ulp slack: members constructed to saturate the modulus must
            // not fail on evaluation rounding alone
            const double slack = 32.0 * std::numeric_limits<double>::epsilon() *
                                 std::max({1.0, std::abs(vals[i]), std::abs(vals[j]), rhs});
            if (lhs > rhs + slack)
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Gaussian sequence model.

namespace {

double mean_bound_value(double C, int M, std::int64_t k, double s) {
    return C * s * std::sqrt(std::log(static_cast<double>(M))) /
           std::sqrt(static_cast<double>(k));
}

} // namespace

void LemmaConfig::validate() const {
    const std::size_t N = n_coords;
    if (N == 0)
        throw validation_error("lemma config: N must be positive");
    if (m_lo < 0 || m_hi < m_lo)
        throw validation_error("lemma config: need 0 <= m_lo <= m_hi");
    if ((std::int64_t(1) << m_lo) < 1 || (std::int64_t(1) << m_hi) > std::int64_t(N))
        throw validation_error("lemma config: need 1 <= 2^m_lo < 2^m_hi <= N");
    if (m_count() < 2)
        throw validation_error("lemma config: need at least two alternatives (M >= 2)");
    if (sdev.size() != N)
        throw validation_error("lemma config: sdev must have length N");
    for (double s : sdev)
        if (!(s > 0.0))
            throw validation_error("lemma config: standard deviations must be positive");
    if (means.size() != static_cast<std::size_t>(m_count()))
        throw validation_error("lemma config: means must have one row per alternative");
    const int M = m_count();
    for (int j = 0; j < M; ++j) {
        if (means[j].size() != N)
            throw validation_error("lemma config: means row " + std::to_string(j) +
                                   " must have length N");
        const std::int64_t k = k_of(j);
        for (std::size_t i = 0; i < N; ++i) {
            if (static_cast<std::int64_t>(i) + 1 > k) {
                if (means[j][i] != 0.0)
                    throw validation_error(
                        "lemma config: support condition violated: m_{i,k} != 0 for i=" +
                        std::to_string(i + 1) + " > k=" + std::to_string(k));
            } else {
                const double cap = mean_bound_value(mean_bound_c, M, k, sdev[i]);
                if (std::abs(means[j][i]) > cap)
                    throw validation_error(
                        "lemma config: mean bound violated at i=" + std::to_string(i + 1) +
                        ", k=" + std::to_string(k) + ": |m/s| > C sqrt(log M)/sqrt(k)");
            }
        }
    }
}

LemmaConfig LemmaConfig::extremal(std::size_t N, int m_lo, int m_hi, double C,
                                  std::vector<double> sdev) {
    LemmaConfig cfg;
    cfg.n_coords = N;
    cfg.m_lo = m_lo;
    cfg.m_hi = m_hi;
    cfg.mean_bound_c = C;
    cfg.sdev = std::move(sdev);
    const int M = cfg.m_count();
    cfg.means.assign(M, std::vector<double>(N, 0.0));
    for (int j = 0; j < M; ++j) {
        const std::int64_t k = cfg.k_of(j);
        for (std::size_t i = 0; i < N && static_cast<std::int64_t>(i) < k; ++i)
            cfg.means[j][i] = mean_bound_value(C, M, k, cfg.sdev[i]);
    }
    cfg.validate();
    return cfg;
}

GaussianTest make_lr_mixture_test(const LemmaConfig& config) {
    config.validate();
    const int M = config.m_count();
    // mu_{i,j} = m_{i,k_j}/s_i, the normalizers sum_i mu^2/2, and the length
    // of each row's support (means vanish for i > k_j).
    std::vector<std::vector<double>> mu(M);
    std::vector<double> half_norm(M, 0.0);
    std::vector<std::size_t> len(M, 0);
    for (int j = 0; j < M; ++j) {
        mu[j].resize(config.n_coords);
        for (std::size_t i = 0; i < config.n_coords; ++i) {
            mu[j][i] = config.means[j][i] / config.sdev[i];
            half_norm[j] += 0.5 * mu[j][i] * mu[j][i];
            if (mu[j][i] != 0.0)
                len[j] = i + 1;
        }
    }
    std::vector<double> sdev = config.sdev;
    return [mu = std::move(mu), half_norm = std::move(half_norm), len = std::move(len),
            sdev = std::move(sdev), M](std::span<const double> w) -> double {
        double mix = 0.0;
        for (int j = 0; j < M; ++j) {
            double dot = 0.0;
            const auto& m = mu[j];
            for (std::size_t i = 0; i < len[j]; ++i)
                dot += m[i] * (w[i] / sdev[i]);
            mix += std::exp(dot - half_norm[j]);
        }
        return mix / static_cast<double>(M) > 1.0 ? 1.0 : 0.0;
    };
}

LemmaGapResult lemma_power_gap(const LemmaConfig& config, const GaussianTest& test,
                               std::size_t reps, std::uint64_t seed, unsigned workers) {
    config.validate();
    if (reps < 2)
        throw validation_error("lemma_power_gap: reps must be at least 2");
    const int M = config.m_count();
    const std::size_t N = config.n_coords;

    // Measure 0 is the null; measure j >= 1 uses means[j-1].
    // Replications parallelize within each measure.
    std::vector<double> sum(M + 1, 0.0), sumsq(M + 1, 0.0);
    std::vector<double> phi(reps);
    for (int meas = 0; meas <= M; ++meas) {
        parallel_for(reps, workers, [&](std::size_t rep) {
            Rng rng = Rng::from_stream(seed, stream_tag::lemma,
                                       static_cast<std::uint64_t>(meas) * reps + rep);
            static thread_local std::vector<double> w;
            w.resize(N);
            for (std::size_t i = 0; i < N; ++i) {
                const double m = meas == 0 ? 0.0 : config.means[meas - 1][i];
                w[i] = m + config.sdev[i] * rng.next_normal();
            }
            phi[rep] = test(std::span<const double>(w.data(), w.size()));
        });
        double s = 0.0, s2 = 0.0;
        for (double v : phi) {
            s += v;
            s2 += v * v;
        }
        sum[meas] = s;
        sumsq[meas] = s2;
    }

    LemmaGapResult res;
    const double rd = static_cast<double>(reps);
    res.size = sum[0] / rd;
    res.power_per_alt.resize(M);
    double avg_power = 0.0;
    double var_combined = 0.0;
    for (int meas = 0; meas <= M; ++meas) {
        const double mean = sum[meas] / rd;
        const double var = std::max(0.0, sumsq[meas] / rd - mean * mean) / rd;
        if (meas == 0) {
            var_combined += var;
        } else {
            res.power_per_alt[meas - 1] = mean;
            avg_power += mean / M;
            var_combined += var / (static_cast<double>(M) * M);
        }
    }
    res.gap = avg_power - res.size;
    res.bound = lemma_bound(config.mean_bound_c, M);
    res.mc_se = std::sqrt(var_combined);
    return res;
}

} // namespace adaptest
