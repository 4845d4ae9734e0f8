#include "adaptest/estimators.hpp"

#include "adaptest/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptest {

namespace {

// The fixed total order: |x| ascending, then x ascending, then input index.
void sort_by_absx(std::span<const double> x, std::vector<std::uint32_t>& idx) {
    idx.resize(x.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double aa = std::abs(x[a]), ab = std::abs(x[b]);
        if (aa != ab)
            return aa < ab;
        if (x[a] != x[b])
            return x[a] < x[b];
        return a < b;
    });
}

} // namespace

double knn_estimate(const Sample& s, std::size_t k, double eta) {
    const std::size_t n = s.size();
    if (n == 0)
        throw validation_error("knn_estimate: empty sample");
    if (k < 1 || k > n)
        throw validation_error("knn_estimate: k out of range [1, n]");
    if (!(eta > 0.0))
        throw validation_error("knn_estimate: eta must be positive");
    if (!(std::abs(s.x[s.order[k - 1]]) < eta))
        return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        sum += s.y[s.order[i]];
    return sum / static_cast<double>(k);
}

TnResult tn_statistic(const Sample& s, double theta0, double eta) {
    const std::size_t n = s.size();
    if (n == 0)
        throw validation_error("tn_statistic: empty sample");
    if (!(eta > 0.0))
        throw validation_error("tn_statistic: eta must be positive");

    TnResult r;
    r.trace.gk.assign(n, 0.0);

    // |x| is nondecreasing along the order, so "this point is inside eta"
    // is exactly "k <= kbar".
    double prefix = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t kbar = 0, argmax = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        prefix += s.y[s.order[k - 1]];
        double term = 0.0;
        if (std::abs(s.x[s.order[k - 1]]) < eta) {
            kbar = k;
            const double kd = static_cast<double>(k);
            const double g = prefix / kd;
            r.trace.gk[k - 1] = g;
            term = std::sqrt(kd) * (g - theta0);
        }
        if (term > best) {
            best = term;
            argmax = k;
        }
    }
    r.value = best + 0.0;
    r.trace.kbar = kbar;
    r.trace.k_argmax = argmax;
    return r;
}

RdResult rd_statistic(const Sample& s, double tau, double eta) {
    const std::size_t n = s.size();
    if (n == 0)
        throw validation_error("rd_statistic: empty sample");
    if (!(eta > 0.0))
        throw validation_error("rd_statistic: eta must be positive");

    // Split at 0; iterating the global fixed order keeps each side ordered.
    std::vector<double> yl, yr, axl, axr;
    for (std::uint32_t i : s.order) {
        if (s.x[i] <= 0.0) {
            yl.push_back(s.y[i]);
            axl.push_back(std::abs(s.x[i]));
        } else {
            yr.push_back(s.y[i]);
            axr.push_back(s.x[i]);
        }
    }
    const std::size_t n1 = yl.size(), n2 = yr.size();
    if (n1 == 0 || n2 == 0)
        throw validation_error("rd_statistic: need observations on both sides of 0");

    RdResult r;
    r.left.gk.assign(n1, 0.0);
    r.right.gk.assign(n2, 0.0);

    std::vector<double> pl(n1 + 1, 0.0), pr(n2 + 1, 0.0);
    std::size_t kb1 = 0, kb2 = 0;
    for (std::size_t k = 1; k <= n1; ++k) {
        pl[k] = pl[k - 1] + yl[k - 1];
        if (axl[k - 1] < eta) {
            kb1 = k;
            r.left.gk[k - 1] = pl[k] / static_cast<double>(k);
        }
    }
    for (std::size_t k = 1; k <= n2; ++k) {
        pr[k] = pr[k - 1] + yr[k - 1];
        if (axr[k - 1] < eta) {
            kb2 = k;
            r.right.gk[k - 1] = pr[k] / static_cast<double>(k);
        }
    }
    r.left.kbar = kb1;
    r.right.kbar = kb2;

    const std::size_t kmax = std::min(n1, n2);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t argmax = 0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        const bool live1 = k <= kb1, live2 = k <= kb2;
        double term;
        if (!live1 && !live2) {
            term = 0.0;
        } else {
            const double kd = static_cast<double>(k);
            double num, tk = 0.0;
            if (live1 && live2) {
                num = pr[k] - pl[k];
                tk = tau;
            } else if (live2) {
                num = pr[k];
            } else {
                num = -pl[k];
            }
            term = std::sqrt(kd) * (num / kd - tk);
        }
        if (term > best) {
            best = term;
            argmax = k;
        }
    }
    r.value = best + 0.0;
    r.k_argmax = argmax;
    return r;
}

double storey_estimate(std::span<const double> pvals, double lambda) {
    if (!(lambda >= 0.0) || lambda >= 1.0)
        throw validation_error("storey_estimate: lambda must lie in [0,1)");
    if (pvals.empty())
        throw validation_error("storey_estimate: empty p-value sequence");
    std::size_t count = 0;
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0))
            throw validation_error("storey_estimate: p-values must lie in [0,1]");
        if (p > lambda)
            ++count;
    }
    return static_cast<double>(count) /
           (static_cast<double>(pvals.size()) * (1.0 - lambda));
}

PiResult pi_statistic(std::span<const double> pvals, double pi0) {
    if (pvals.empty())
        throw validation_error("pi_statistic: empty p-value sequence");
    if (!(pi0 > 0.0) || pi0 > 1.0)
        throw validation_error("pi_statistic: pi0 must lie in (0,1]");
    std::vector<double> p(pvals.begin(), pvals.end());
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0))
            throw validation_error("pi_statistic: p-values must lie in [0,1]");
    std::sort(p.begin(), p.end());

    const std::size_t n = p.size();
    const double nd = static_cast<double>(n);
    std::size_t zeros = 0;
    while (zeros < n && p[zeros] == 0.0)
        ++zeros;

    // lambda = 0 first, then the order-statistic candidates.  Evaluating every
    // index of a tie block is harmless: only the last index carries the exact
    // exceedance count and the others evaluate lower, at the same lambda.
    PiResult r;
    double best = kernels::pi_candidate_value(nd, pi0, 0.0, static_cast<double>(n - zeros));
    double arg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] >= 1.0)
            break;
        const double v =
            kernels::pi_candidate_value(nd, pi0, p[i], static_cast<double>(n - 1 - i));
        if (v > best) {
            best = v;
            arg = p[i];
        }
    }
    r.value = best + 0.0;
    r.lambda_argmax = arg;
    return r;
}

// ---------------------------------------------------------------------------
// Hot paths.

double tn_value(std::span<const double> x, std::span<const double> y, double theta0,
                double eta, TnScratch& scratch) {
    const std::size_t n = x.size();
    if (n == 0 || y.size() != n)
        throw validation_error("tn_value: bad input lengths");
    sort_by_absx(x, scratch.idx);
    auto& prefix = scratch.prefix;
    prefix.resize(n + 1);
    prefix[0] = 0.0;
    std::size_t kbar = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        const std::uint32_t i = scratch.idx[k - 1];
        prefix[k] = prefix[k - 1] + y[i];
        if (std::abs(x[i]) < eta)
            kbar = k;
    }
    double best = -std::numeric_limits<double>::infinity();
    if (kbar >= 1)
        best = kernels::max_sqrtk_gap(prefix.data(), nullptr, theta0, 1, kbar);
    if (kbar < n && 0.0 > best)
        best = 0.0;
    return best + 0.0;
}

double rd_value(std::span<const double> x, std::span<const double> y, double tau,
                double eta, RdScratch& scratch) {
    const std::size_t n = x.size();
    if (n == 0 || y.size() != n)
        throw validation_error("rd_value: bad input lengths");

    sort_by_absx(x, scratch.idx);
    auto& pl = scratch.prefix_left;
    auto& pr = scratch.prefix_right;
    pl.assign(1, 0.0);
    pr.assign(1, 0.0);
    pl.reserve(n + 1);
    pr.reserve(n + 1);
    std::size_t kb1 = 0, kb2 = 0;
    for (std::uint32_t i : scratch.idx) {
        if (x[i] <= 0.0) {
            pl.push_back(pl.back() + y[i]);
            if (std::abs(x[i]) < eta)
                kb1 = pl.size() - 1;
        } else {
            pr.push_back(pr.back() + y[i]);
            if (x[i] < eta)
                kb2 = pr.size() - 1;
        }
    }
    const std::size_t n1 = pl.size() - 1, n2 = pr.size() - 1;
    if (n1 == 0 || n2 == 0)
        throw validation_error("rd_value: need observations on both sides of 0");
    const std::size_t kmax = std::min(n1, n2);

    double best = -std::numeric_limits<double>::infinity();
    const std::size_t m = std::min({kb1, kb2, kmax});
    if (m >= 1)
        best = kernels::max_sqrtk_gap(pr.data(), pl.data(), tau, 1, m);
    if (kb2 > kb1) {
        const std::size_t hi = std::min(kb2, kmax);
        if (hi > m) {
            const double v = kernels::max_sqrtk_gap(pr.data(), nullptr, 0.0, m + 1, hi);
            if (v > best)
                best = v;
        }
    } else if (kb1 > kb2) {
        const std::size_t hi = std::min(kb1, kmax);
        if (hi > m) {
            auto& neg = scratch.neg;
            neg.resize(hi + 1);
            for (std::size_t k = m + 1; k <= hi; ++k)
                neg[k] = -pl[k];
            const double v = kernels::max_sqrtk_gap(neg.data(), nullptr, 0.0, m + 1, hi);
            if (v > best)
                best = v;
        }
    }
    if (std::max(kb1, kb2) < kmax && 0.0 > best)
        best = 0.0;
    return best + 0.0;
}

double pi_value_sorted(std::span<const double> sorted_pvals, double pi0) {
    if (sorted_pvals.empty())
        throw validation_error("pi_value_sorted: empty p-value sequence");
    if (!(pi0 > 0.0) || pi0 > 1.0)
        throw validation_error("pi_value_sorted: pi0 must lie in (0,1]");
    return kernels::pi_candidate_max(sorted_pvals.data(), sorted_pvals.size(), pi0);
}

} // namespace adaptest
