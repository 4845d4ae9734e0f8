#include "adaptest/critical_values.hpp"

#include "adaptest/estimators.hpp"
#include "adaptest/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace adaptest {

const char* stat_kind_name(StatKind k) {
    switch (k) {
    case StatKind::point:
        return "point";
    case StatKind::rd:
        return "rd";
    case StatKind::pi0:
        return "pi0";
    }
    return "?";
}

StatKind stat_kind_from_name(const std::string& s) {
    if (s == "point")
        return StatKind::point;
    if (s == "rd")
        return StatKind::rd;
    if (s == "pi0")
        return StatKind::pi0;
    throw validation_error("critval: unknown statistic kind '" + s + "'");
}

double CritValSpec::effective_eta() const {
    if (trunc_eta > 0.0)
        return trunc_eta;
    if (design)
        return design->eta();
    return 0.0;
}

void CritValSpec::validate() const {
    if (n < 1)
        throw validation_error("critval: n must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw validation_error("critval: alpha must lie in (0,1)");
    if (reps < 1)
        throw validation_error("critval: reps must be positive");
    switch (kind) {
    case StatKind::point:
        if (!design)
            throw validation_error("critval: point kind needs a design");
        break;
    case StatKind::rd:
        if (!design)
            throw validation_error("critval: rd kind needs a design");
        if (!design->rd_bounds())
            throw validation_error("critval: rd kind needs a design with rd_bounds");
        if (n < 2)
            throw validation_error("critval: rd kind needs n >= 2");
        break;
    case StatKind::pi0:
        if (!(pi0 > 0.0) || pi0 > 1.0)
            throw validation_error("critval: pi0 must lie in (0,1]");
        break;
    }
}

std::string CritValSpec::design_fp() const {
    std::string s;
    if (kind == StatKind::pi0) {
        s = "pi0=" + format_double(pi0);
    } else {
        s = design->fingerprint();
    }
    if (trunc_eta > 0.0)
        s += "+eta=" + format_double(trunc_eta);
    return s;
}

void draw_pi0_null_sorted(std::vector<double>& out, std::size_t n, double pi0, Rng& rng) {
    out.resize(n);
    // Number of exact zeros (the delta_0 component).
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (rng.next_unit() >= pi0)
            ++zeros;
    for (std::size_t i = 0; i < zeros; ++i)
        out[i] = 0.0;
    const std::size_t m = n - zeros;
    if (m == 0)
        return;
    // Sorted uniforms via exponential spacings: U_(i) = S_i / S_{m+1}.
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        total += rng.next_exponential();
        out[zeros + i] = total;
    }
    total += rng.next_exponential();
    for (std::size_t i = 0; i < m; ++i)
        out[zeros + i] /= total;
}

double simulate_null_statistic(const CritValSpec& spec, std::size_t rep) {
    switch (spec.kind) {
    case StatKind::point: {
        Rng rng = Rng::from_stream(spec.seed, stream_tag::critval_point, rep);
        static thread_local std::vector<double> xs, ys;
        static thread_local TnScratch scratch;
        xs.resize(spec.n);
        ys.resize(spec.n);
        const DesignSpec& d = *spec.design;
        for (std::size_t i = 0; i < spec.n; ++i) {
            xs[i] = d.sample_x(rng);
            ys[i] = d.sigma(xs[i]) * rng.next_normal();
        }
        return tn_value(xs, ys, 0.0, spec.effective_eta(), scratch);
    }
    case StatKind::rd: {
        Rng rng = Rng::from_stream(spec.seed, stream_tag::critval_rd, rep);
        static thread_local std::vector<double> xs, ys;
        static thread_local RdScratch scratch;
        const DesignSpec& d = *spec.design;
        // Fresh draws until both sides are populated; at usable sizes a
        // one-sided draw is essentially impossible but must not deadlock
        // the engine.
        for (int attempt = 0; attempt < 64; ++attempt) {
            xs.resize(spec.n);
            ys.resize(spec.n);
            bool has_left = false, has_right = false;
            for (std::size_t i = 0; i < spec.n; ++i) {
                xs[i] = d.sample_x(rng);
                ys[i] = d.sigma(xs[i]) * rng.next_normal();
                (xs[i] <= 0.0 ? has_left : has_right) = true;
            }
            if (has_left && has_right)
                return rd_value(xs, ys, 0.0, spec.effective_eta(), scratch);
        }
        throw numeric_error("critval: design kept producing one-sided samples");
    }
    case StatKind::pi0: {
        Rng rng = Rng::from_stream(spec.seed, stream_tag::critval_pi0, rep);
        static thread_local std::vector<double> ps;
        draw_pi0_null_sorted(ps, spec.n, spec.pi0, rng);
        return pi_value_sorted(ps, spec.pi0);
    }
    }
    throw numeric_error("critval: unreachable statistic kind");
}

CritValue mc_quantile(const CritValSpec& spec, unsigned workers) {
    spec.validate();
    const std::size_t R = spec.reps;
    const std::size_t idx = static_cast<std::size_t>(
        std::ceil(static_cast<double>(R) * (1.0 - spec.alpha)));
    const std::size_t d = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(R) * spec.alpha * (1.0 - spec.alpha))));
    if (idx < 1 || idx + d > R || idx <= d)
        throw validation_error(
            "critval: reps too small for the requested alpha (order-statistic index "
            "collision at the boundary)");

    std::vector<double> vals(R);
    parallel_for(R, workers,
                 [&](std::size_t rep) { vals[rep] = simulate_null_statistic(spec, rep); });
    std::sort(vals.begin(), vals.end());

    CritValue cv;
    cv.value = vals[idx - 1];
    cv.mc_se = 0.5 * (vals[idx + d - 1] - vals[idx - d - 1]);
    return cv;
}

double lil_reference(std::size_t n, double sigma_sup) {
    if (n < 16)
        throw validation_error("lil_reference: n must be at least 16 so log log n > 0");
    if (sigma_sup < 0.0)
        throw validation_error("lil_reference: sigma_sup must be nonnegative");
    const double nd = static_cast<double>(n);
    return std::sqrt(2.0) * sigma_sup * std::sqrt(std::log(std::log(nd)));
}

// ---------------------------------------------------------------------------
// Cache

std::string CritValCache::key_of(const CritValSpec& spec) {
    std::string k = stat_kind_name(spec.kind);
    k += ",";
    k += std::to_string(spec.n);
    k += ",";
    k += format_double(spec.alpha);
    k += ",";
    k += spec.design_fp();
    k += ",";
    k += std::to_string(spec.reps);
    k += ",";
    k += std::to_string(spec.seed);
    return k;
}

CritValCache::CritValCache(std::filesystem::path file) : path_(std::move(file)) {
    std::ifstream in(path_);
    if (!in)
        return; // absent file: empty cache, created on first store
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (lineno == 1) {
            if (line != "kind,n,alpha,design_fp,reps,seed,critval,mc_se")
                throw validation_error(path_.string() + ":1: bad cache header");
            continue;
        }
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            f.push_back(tok);
        if (f.size() != 8)
            throw validation_error(path_.string() + ":" + std::to_string(lineno) +
                                   ": expected 8 fields");
        const std::string key = f[0] + "," + f[1] + "," + f[2] + "," + f[3] + "," + f[4] +
                                "," + f[5];
        CritValue cv;
        cv.value = std::stod(f[6]);
        cv.mc_se = std::stod(f[7]);
        entries_[key] = cv;
    }
}

std::optional<CritValue> CritValCache::lookup(const CritValSpec& spec) const {
    const auto it = entries_.find(key_of(spec));
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

void CritValCache::append_row(const CritValSpec& spec, const CritValue& cv) const {
    if (path_.empty())
        return;
    const bool fresh = !std::filesystem::exists(path_);
    std::ofstream out(path_, std::ios::app);
    if (!out)
        throw validation_error("critval cache: cannot open '" + path_.string() +
                               "' for writing");
    if (fresh)
        out << "kind,n,alpha,design_fp,reps,seed,critval,mc_se\n";
    out << key_of(spec) << ',' << format_double(cv.value) << ','
        << format_double(cv.mc_se) << '\n';
}

void CritValCache::store(const CritValSpec& spec, const CritValue& cv) {
    const std::string key = key_of(spec);
    if (entries_.count(key))
        return;
    entries_[key] = cv;
    append_row(spec, cv);
}

} // namespace adaptest
