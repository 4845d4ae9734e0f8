#include "adaptest/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace adaptest {

// --------------------------------------------------------------------------
// Sigma2Spec

double Sigma2Spec::operator()(double x) const {
    if (kind == "constant")
        return params[0];
    if (kind == "affine_abs")
        return params[0] + params[1] * std::abs(x);
    throw validation_error("sigma2: unknown kind '" + kind + "'");
}

void Sigma2Spec::validate() const {
    if (kind == "constant") {
        if (params.size() != 1)
            throw validation_error("sigma2: constant kind takes exactly one parameter");
    } else if (kind == "affine_abs") {
        if (params.size() != 2)
            throw validation_error("sigma2: affine_abs kind takes exactly two parameters");
    } else {
        throw validation_error("sigma2: unknown kind '" + kind + "'");
    }
    for (double p : params)
        if (!std::isfinite(p))
            throw validation_error("sigma2: non-finite parameter");
}

// --------------------------------------------------------------------------
// DesignSpec

double DesignSpec::sigma(double x) const { return std::sqrt(sigma2_(x)); }

double DesignSpec::quantile(double u) const {
    switch (fx_kind_) {
    case FxKind::uniform_sym:
        return -1.0 + 2.0 * u;
    case FxKind::uniform_pos:
        return u;
    case FxKind::quantile:
        return quantile_(u);
    }
    return 0.0;
}

double DesignSpec::cdf(double t) const {
    switch (fx_kind_) {
    case FxKind::uniform_sym:
        return std::clamp((t + 1.0) / 2.0, 0.0, 1.0);
    case FxKind::uniform_pos:
        return std::clamp(t, 0.0, 1.0);
    case FxKind::quantile: {
        // Q is nondecreasing: F(t) = sup{u : Q(u) <= t}, by bisection.
        if (quantile_(0.0) > t)
            return 0.0;
        if (quantile_(1.0) <= t)
            return 1.0;
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (quantile_(mid) <= t)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }
    }
    return 0.0;
}

void DesignSpec::validate(int grid_points) const {
    if (!(eta_ > 0.0))
        throw validation_error("design: eta must be positive");
    if (!(sigma_sup_ > 0.0) || !std::isfinite(sigma_sup_))
        throw validation_error("design: sigma_sup must be positive and finite");
    sigma2_.validate();
    if (grid_points < 2)
        grid_points = 2;

    // eta t <= F(t) - F(-t) <= t / eta on a t-grid in (0, eta).
    for (int i = 1; i <= grid_points; ++i) {
        const double t = eta_ * i / (grid_points + 1);
        const double mass = cdf(t) - cdf(-t);
        if (mass < eta_ * t - 1e-12)
            throw validation_error(
                "design: lower design bound violated: F(t)-F(-t) < eta*t at t=" +
                format_double(t));
        if (mass > t / eta_ + 1e-12)
            throw validation_error(
                "design: upper design bound violated: F(t)-F(-t) > t/eta at t=" +
                format_double(t));
        if (rd_bounds_) {
            const double right = cdf(t) - cdf(0.0);
            const double left = cdf(0.0) - cdf(-t);
            if (right < eta_ * t - 1e-12 || right > t / eta_ + 1e-12)
                throw validation_error(
                    "design: one-sided bound violated: F(t)-F(0) outside [eta*t, t/eta] at t=" +
                    format_double(t));
            if (left < eta_ * t - 1e-12 || left > t / eta_ + 1e-12)
                throw validation_error(
                    "design: one-sided bound violated: F(0)-F(-t) outside [eta*t, t/eta] at t=" +
                    format_double(t));
        }
    }

    // eta <= sigma^2(x) <= 1/eta for |x| < eta, and sigma_sup over the support.
    for (int i = 0; i <= grid_points; ++i) {
        const double frac = static_cast<double>(i) / grid_points;
        const double x_near = -eta_ + 2.0 * eta_ * frac;
        if (x_near > support_lo_ && x_near < support_hi_) {
            const double s2 = sigma2_(x_near);
            if (s2 < eta_ - 1e-12)
                throw validation_error("design: variance bound violated: sigma^2(x) < eta at x=" +
                                       format_double(x_near));
            if (s2 > 1.0 / eta_ + 1e-12)
                throw validation_error("design: variance bound violated: sigma^2(x) > 1/eta at x=" +
                                       format_double(x_near));
        }
        const double x_sup = support_lo_ + (support_hi_ - support_lo_) * frac;
        if (std::sqrt(sigma2_(x_sup)) > sigma_sup_ + 1e-12)
            throw validation_error("design: sigma_sup is not an upper bound: sigma(x) > sigma_sup at x=" +
                                   format_double(x_sup));
    }
}

void DesignSpec::sigma2_spec_ok() const { sigma2_.validate(); }

DesignSpec DesignSpec::uniform_sym(double eta, Sigma2Spec sigma2, double sigma_sup,
                                   bool rd_bounds) {
    DesignSpec d;
    d.fx_kind_ = FxKind::uniform_sym;
    d.support_lo_ = -1.0;
    d.support_hi_ = 1.0;
    d.sigma2_ = std::move(sigma2);
    d.eta_ = eta;
    d.sigma_sup_ = sigma_sup;
    d.rd_bounds_ = rd_bounds;
    d.validate();
    return d;
}

DesignSpec DesignSpec::uniform_pos(double eta, Sigma2Spec sigma2, double sigma_sup) {
    DesignSpec d;
    d.fx_kind_ = FxKind::uniform_pos;
    d.support_lo_ = 0.0;
    d.support_hi_ = 1.0;
    d.sigma2_ = std::move(sigma2);
    d.eta_ = eta;
    d.sigma_sup_ = sigma_sup;
    d.validate();
    return d;
}

DesignSpec DesignSpec::from_quantile(std::function<double(double)> quantile,
                                     double support_lo, double support_hi,
                                     std::string label, double eta, Sigma2Spec sigma2,
                                     double sigma_sup, bool rd_bounds) {
    if (!quantile)
        throw validation_error("design: quantile function must be set");
    if (label.empty())
        throw validation_error("design: quantile designs need a label for cache keys");
    DesignSpec d;
    d.fx_kind_ = FxKind::quantile;
    d.quantile_ = std::move(quantile);
    d.support_lo_ = support_lo;
    d.support_hi_ = support_hi;
    d.label_ = std::move(label);
    d.sigma2_ = std::move(sigma2);
    d.eta_ = eta;
    d.sigma_sup_ = sigma_sup;
    d.rd_bounds_ = rd_bounds;
    d.validate();
    return d;
}

std::string DesignSpec::fingerprint() const {
    std::string s;
    switch (fx_kind_) {
    case FxKind::uniform_sym:
        s = "uniform_sym";
        break;
    case FxKind::uniform_pos:
        s = "uniform_pos";
        break;
    case FxKind::quantile:
        s = "quantile:" + label_;
        break;
    }
    s += "|" + sigma2_.kind;
    for (double p : sigma2_.params)
        s += ":" + format_double(p);
    s += "|eta=" + format_double(eta_);
    s += "|sup=" + format_double(sigma_sup_);
    if (rd_bounds_)
        s += "|rd";
    return to_hex(fnv1a(s));
}

DesignSpec DesignSpec::from_json(const nlohmann::json& j) {
    if (!j.contains("fx"))
        throw validation_error("design: missing field 'fx'");
    const std::string fx = j.at("fx").get<std::string>();
    Sigma2Spec s2;
    if (j.contains("sigma2")) {
        const auto& js = j.at("sigma2");
        s2.kind = js.value("kind", std::string("constant"));
        if (js.contains("params"))
            s2.params = js.at("params").get<std::vector<double>>();
    }
    if (!j.contains("eta"))
        throw validation_error("design: missing field 'eta'");
    if (!j.contains("sigma_sup"))
        throw validation_error("design: missing field 'sigma_sup'");
    const double eta = j.at("eta").get<double>();
    const double sup = j.at("sigma_sup").get<double>();
    const bool rd = j.value("rd_bounds", false);
    if (fx == "uniform_sym")
        return uniform_sym(eta, std::move(s2), sup, rd);
    if (fx == "uniform_pos") {
        if (rd)
            throw validation_error("design: rd_bounds requires support on both sides of 0");
        return uniform_pos(eta, std::move(s2), sup);
    }
    throw validation_error("design: unknown fx kind '" + fx +
                           "' (quantile designs cannot be loaded from JSON)");
}

nlohmann::json DesignSpec::to_json() const {
    nlohmann::json j;
    switch (fx_kind_) {
    case FxKind::uniform_sym:
        j["fx"] = "uniform_sym";
        break;
    case FxKind::uniform_pos:
        j["fx"] = "uniform_pos";
        break;
    case FxKind::quantile:
        throw validation_error("design: quantile designs cannot be serialized");
    }
    j["sigma2"] = {{"kind", sigma2_.kind}, {"params", sigma2_.params}};
    j["eta"] = eta_;
    j["sigma_sup"] = sigma_sup_;
    j["rd_bounds"] = rd_bounds_;
    return j;
}

// --------------------------------------------------------------------------
// RegressionFunction

RegressionFunction RegressionFunction::zero() { return RegressionFunction(); }

RegressionFunction RegressionFunction::constant(double b) {
    RegressionFunction f;
    f.kind_ = Kind::constant;
    f.level_ = b;
    return f;
}

RegressionFunction RegressionFunction::holder_alt(double beta, double L, double c,
                                                  std::int64_t n) {
    if (!(beta > 0.0) || beta > 1.0)
        throw validation_error("holder_alt: beta must lie in (0,1]");
    if (!(L > 0.0))
        throw validation_error("holder_alt: L must be positive");
    if (n < 16)
        throw validation_error("holder_alt: n must be at least 16 so log log n > 0");
    RegressionFunction f;
    f.kind_ = Kind::holder_alt;
    f.level_ = c;
    f.beta_ = beta;
    f.holder_l_ = L;
    const double nd = static_cast<double>(n);
    f.height_ = c * std::pow(std::log(std::log(nd)) / nd, beta / (2.0 * beta + 1.0));
    return f;
}

RegressionFunction RegressionFunction::bump(double b, double beta, double L) {
    if (!(beta > 0.0) || beta > 1.0)
        throw validation_error("bump: beta must lie in (0,1]");
    if (!(L > 0.0))
        throw validation_error("bump: L must be positive");
    RegressionFunction f;
    f.kind_ = Kind::bump;
    f.level_ = b;
    f.beta_ = beta;
    f.holder_l_ = L;
    f.height_ = b;
    return f;
}

RegressionFunction RegressionFunction::user_grid(std::vector<double> xs,
                                                 std::vector<double> gs) {
    if (xs.size() != gs.size() || xs.empty())
        throw validation_error("user_grid: xs and gs must be nonempty and equally sized");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw validation_error("user_grid: xs must be sorted ascending");
    RegressionFunction f;
    f.kind_ = Kind::user_grid;
    f.grid_x_ = std::move(xs);
    f.grid_g_ = std::move(gs);
    return f;
}

double RegressionFunction::operator()(double x) const {
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::constant:
        return level_;
    case Kind::holder_alt:
    case Kind::bump:
        return std::max(height_ - holder_l_ * std::pow(std::abs(x), beta_), 0.0);
    case Kind::user_grid: {
        if (x <= grid_x_.front())
            return grid_g_.front();
        if (x >= grid_x_.back())
            return grid_g_.back();
        const auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - grid_x_.begin());
        const double w = (x - grid_x_[i - 1]) / (grid_x_[i] - grid_x_[i - 1]);
        return grid_g_[i - 1] + w * (grid_g_[i] - grid_g_[i - 1]);
    }
    }
    return 0.0;
}

// --------------------------------------------------------------------------
// Sample

Sample Sample::from_xy(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size())
        throw validation_error("sample: x and y lengths differ");
    if (x.size() > std::numeric_limits<std::uint32_t>::max())
        throw validation_error("sample: too many observations");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw validation_error("sample: non-finite value at row " + std::to_string(i + 1));
    Sample s;
    s.x = std::move(x);
    s.y = std::move(y);
    s.order.resize(s.x.size());
    for (std::uint32_t i = 0; i < s.order.size(); ++i)
        s.order[i] = i;
    std::sort(s.order.begin(), s.order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double aa = std::abs(s.x[a]), ab = std::abs(s.x[b]);
        if (aa != ab)
            return aa < ab;
        if (s.x[a] != s.x[b])
            return s.x[a] < s.x[b];
        return a < b;
    });
    return s;
}

Sample read_sample_csv(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line))
        throw validation_error(name + ":1: empty file, expected header 'x,y'");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "x,y")
        throw validation_error(name + ":1: expected header 'x,y', got '" + line + "'");
    std::vector<double> xs, ys;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw validation_error(name + ":" + std::to_string(lineno) +
                                   ": expected two comma-separated fields");
        double xv, yv;
        const char* b1 = line.data();
        const char* e1 = line.data() + comma;
        auto r1 = std::from_chars(b1, e1, xv);
        const char* b2 = line.data() + comma + 1;
        const char* e2 = line.data() + line.size();
        auto r2 = std::from_chars(b2, e2, yv);
        if (r1.ec != std::errc() || r1.ptr != e1 || r2.ec != std::errc() || r2.ptr != e2)
            throw validation_error(name + ":" + std::to_string(lineno) +
                                   ": could not parse numeric fields");
        xs.push_back(xv);
        ys.push_back(yv);
    }
    return Sample::from_xy(std::move(xs), std::move(ys));
}

void write_sample_csv(const Sample& s, std::ostream& out) {
    out << "x,y\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << format_double(s.x[i]) << ',' << format_double(s.y[i]) << '\n';
}

// --------------------------------------------------------------------------
// MixtureSpec

void MixtureSpec::validate() const {
    if (!(pi >= 0.0 && pi <= 1.0))
        throw validation_error("mixture: pi must lie in [0,1]");
    switch (f1_kind) {
    case F1Kind::point_mass_at_zero:
        break;
    case F1Kind::beta_like:
        if (!(a > 0.0) || !(b > 0.0))
            throw validation_error("mixture: beta_like parameters must be positive");
        break;
    case F1Kind::holder_power:
        if (!(beta > 0.0) || beta > 1.0)
            throw validation_error("mixture: holder_power beta must lie in (0,1]");
        break;
    }
}

double MixtureSpec::f1_density(double x) const {
    switch (f1_kind) {
    case F1Kind::point_mass_at_zero:
        throw numeric_error("mixture: point mass has no density");
    case F1Kind::beta_like:
        return a * b * std::pow(x, a - 1.0) * std::pow(1.0 - std::pow(x, a), b - 1.0);
    case F1Kind::holder_power:
        return (beta + 1.0) * std::pow(1.0 - x, beta);
    }
    return 0.0;
}

double MixtureSpec::fp_density(double x) const {
    return pi + (1.0 - pi) * f1_density(x);
}

double MixtureSpec::sample_f1(Rng& rng) const {
    switch (f1_kind) {
    case F1Kind::point_mass_at_zero:
        return 0.0;
    case F1Kind::beta_like: {
        const double u = rng.next_unit();
        return std::pow(1.0 - std::pow(1.0 - u, 1.0 / b), 1.0 / a);
    }
    case F1Kind::holder_power: {
        const double u = rng.next_unit();
        return 1.0 - std::pow(1.0 - u, 1.0 / (beta + 1.0));
    }
    }
    return 0.0;
}

MixtureSpec MixtureSpec::from_json(const nlohmann::json& j) {
    MixtureSpec m;
    if (!j.contains("pi"))
        throw validation_error("mixture: missing field 'pi'");
    m.pi = j.at("pi").get<double>();
    const std::string kind = j.value("f1", std::string("point_mass_at_0"));
    if (kind == "point_mass_at_0") {
        m.f1_kind = F1Kind::point_mass_at_zero;
    } else if (kind == "beta_like") {
        m.f1_kind = F1Kind::beta_like;
        m.a = j.value("a", 1.0);
        m.b = j.value("b", 2.0);
    } else if (kind == "holder_power") {
        m.f1_kind = F1Kind::holder_power;
        m.beta = j.value("beta", 1.0);
    } else {
        throw validation_error("mixture: unknown f1 kind '" + kind + "'");
    }
    m.validate();
    return m;
}

nlohmann::json MixtureSpec::to_json() const {
    nlohmann::json j;
    j["pi"] = pi;
    switch (f1_kind) {
    case F1Kind::point_mass_at_zero:
        j["f1"] = "point_mass_at_0";
        break;
    case F1Kind::beta_like:
        j["f1"] = "beta_like";
        j["a"] = a;
        j["b"] = b;
        break;
    case F1Kind::holder_power:
        j["f1"] = "holder_power";
        j["beta"] = beta;
        break;
    }
    return j;
}

// --------------------------------------------------------------------------
// Generators

Sample gen_regression_sample(std::size_t n, const RegressionFunction& g,
                             const DesignSpec& design, std::uint64_t seed) {
    if (n < 1)
        throw validation_error("gen_regression_sample: n must be positive");
    Rng rng = Rng::from_stream(seed, stream_tag::regression, 0);
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = design.sample_x(rng);
        xs[i] = x;
        ys[i] = g(x) + design.sigma(x) * rng.next_normal();
    }
    return Sample::from_xy(std::move(xs), std::move(ys));
}

std::vector<double> gen_pvalue_sample(std::size_t n, const MixtureSpec& mix,
                                      std::uint64_t seed) {
    if (n < 1)
        throw validation_error("gen_pvalue_sample: n must be positive");
    mix.validate();
    Rng rng = Rng::from_stream(seed, stream_tag::pvalues, 0);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.next_unit() < mix.pi)
            p[i] = rng.next_unit();
        else
            p[i] = mix.sample_f1(rng);
    }
    return p;
}

RdEmbedding rd_embed(const RegressionFunction& g) {
    const double g0 = g(0.0);
    if (!std::isfinite(g0))
        throw numeric_error("rd_embed: g(0) is not finite");
    RdEmbedding e;
    e.tau = 2.0 * g0;
    e.m = [g, g0](double x) {
        const double sgn = x > 0.0 ? 1.0 : -1.0;
        return g(x) * sgn - 2.0 * g0 * (x > 0.0 ? 1.0 : 0.0);
    };
    return e;
}

bool check_an_event(const Sample& s, double eta) {
    if (s.size() == 0)
        throw validation_error("check_an_event: empty sample");
    if (!(eta > 0.0))
        throw validation_error("check_an_event: eta must be positive");
    const std::size_t n = s.size();
    const double nd = static_cast<double>(n);
    const double t_lo = std::log(nd) / nd;
    if (t_lo >= eta)
        return true; // the t-range is empty

    std::vector<double> ax(n);
    for (std::size_t i = 0; i < n; ++i)
        ax[i] = std::abs(s.x[s.order[i]]);

    // Cut points: t_lo, the jump points strictly inside (t_lo, eta), eta.
    std::vector<double> cuts;
    cuts.push_back(t_lo);
    for (double v : ax)
        if (v > t_lo && v < eta && (cuts.empty() || v != cuts.back()))
            cuts.push_back(v);
    cuts.push_back(eta);

    // On each piece [u_i, u_{i+1}) the count c_i = #{|x| <= u_i} is constant;
    // the upper bound binds as t decreases to u_i, the lower bound as t
    // increases to u_{i+1}.  Both limit comparisons are exact.
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double u = cuts[i];
        const double c =
            static_cast<double>(std::upper_bound(ax.begin(), ax.end(), u) - ax.begin());
        if (c / nd > 2.0 * u / eta)
            return false;
        if (c / nd < eta * cuts[i + 1] / 2.0)
            return false;
    }
    return true;
}

} // namespace adaptest
