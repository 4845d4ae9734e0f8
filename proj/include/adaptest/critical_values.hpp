#pragma once

#include "adaptest/dgp.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adaptest {

enum class StatKind { point, rd, pi0 };

const char* stat_kind_name(StatKind k);
StatKind stat_kind_from_name(const std::string& s);

struct CritValSpec {
    StatKind kind = StatKind::point;
    std::size_t n = 0;
    double alpha = 0.05;
    std::size_t reps = 20000; // default R; quantile s.e. ~ 0.02 at desk scale
    std::uint64_t seed = 0;
    double pi0 = 1.0;                  // pi0 kind only
    std::optional<DesignSpec> design;  // point / rd kinds
    double trunc_eta = -1.0;           // truncation radius override; < 0 -> design eta

    double effective_eta() const;
    void validate() const;
    // Cache key component describing the null configuration.
    std::string design_fp() const;
};

struct CritValue {
    double value = 0.0;
    double mc_se = 0.0;
};

// Simulates `reps` independent draws of the designated statistic under its
// null (fresh design points every replication) and returns the
// ceil(R(1-alpha))-th order statistic, plus a quantile standard error from
// the order-statistic spacing at indices +/- ceil(sqrt(R alpha (1-alpha))).
CritValue mc_quantile(const CritValSpec& spec, unsigned workers = 1);

// sqrt(2) * sigma_sup * sqrt(log log n): the asymptotic envelope for the
// critical values.  Requires n >= 16.
double lil_reference(std::size_t n, double sigma_sup);

// Null sampler for the pi0 statistic: n draws from
// pi0 * unif(0,1) + (1 - pi0) * delta_0, returned sorted ascending.
// Uniform order statistics come from exponential spacings, so no sort is
// needed; the law is exactly that of sorted i.i.d. draws.
void draw_pi0_null_sorted(std::vector<double>& out, std::size_t n, double pi0, Rng& rng);

// One simulated null statistic draw; exposed for distribution-level checks.
double simulate_null_statistic(const CritValSpec& spec, std::size_t rep);

// ---------------------------------------------------------------------------
// CSV-backed cache: kind,n,alpha,design_fp,reps,seed,critval,mc_se

class CritValCache {
public:
    CritValCache() = default;
    explicit CritValCache(std::filesystem::path file);

    std::optional<CritValue> lookup(const CritValSpec& spec) const;
    void store(const CritValSpec& spec, const CritValue& cv);

    const std::filesystem::path& path() const { return path_; }
    std::size_t size() const { return entries_.size(); }

private:
    static std::string key_of(const CritValSpec& spec);
    void append_row(const CritValSpec& spec, const CritValue& cv) const;

    std::filesystem::path path_;
    std::map<std::string, CritValue> entries_;
};

} // namespace adaptest
