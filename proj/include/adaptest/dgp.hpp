#pragma once

#include "adaptest/common.hpp"
#include "adaptest/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace adaptest {

// ---------------------------------------------------------------------------
// Design: distribution of the running variable X, conditional variance of the
// noise, and the regularity constant eta that ties them together.  Designs
// are validated at construction (factories and JSON loader); the generators
// then trust them.

enum class FxKind { uniform_sym, uniform_pos, quantile };

struct Sigma2Spec {
    // "constant": params = {v}, sigma^2(x) = v
    // "affine_abs": params = {a, b}, sigma^2(x) = a + b*|x|
    std::string kind = "constant";
    std::vector<double> params{1.0};

    double operator()(double x) const;
    void validate() const;
};

class DesignSpec {
public:
    // Uniform on [-1,1]; the point of interest 0 is interior.
    static DesignSpec uniform_sym(double eta, Sigma2Spec sigma2, double sigma_sup,
                                  bool rd_bounds = false);
    // Uniform on [0,1]; 0 sits on the boundary of the support.
    static DesignSpec uniform_pos(double eta, Sigma2Spec sigma2, double sigma_sup);
    // User-supplied quantile function on a bounded interval.  `label` keys
    // the critical-value cache; serialization of the function itself is not
    // supported.
    static DesignSpec from_quantile(std::function<double(double)> quantile,
                                    double support_lo, double support_hi,
                                    std::string label, double eta, Sigma2Spec sigma2,
                                    double sigma_sup, bool rd_bounds = false);

    static DesignSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    FxKind fx_kind() const { return fx_kind_; }
    double eta() const { return eta_; }
    double sigma_sup() const { return sigma_sup_; }
    double sigma2(double x) const { return sigma2_(x); }
    double sigma(double x) const;
    bool rd_bounds() const { return rd_bounds_; }
    double support_lo() const { return support_lo_; }
    double support_hi() const { return support_hi_; }

    double quantile(double u) const;
    double cdf(double t) const; // analytic for the uniform kinds, bisection otherwise

    double sample_x(Rng& rng) const { return quantile(rng.next_unit()); }

    // Stable identifier for cache keys.
    std::string fingerprint() const;

    // Grid checks of the regularity bounds; throws validation_error naming
    // the violated bound.  Factories call this; it is public so loaded or
    // hand-edited configurations can be re-checked.
    void validate(int grid_points = 512) const;

private:
    DesignSpec() = default;

    FxKind fx_kind_ = FxKind::uniform_sym;
    double support_lo_ = -1.0, support_hi_ = 1.0;
    std::function<double(double)> quantile_;
    std::string label_;
    Sigma2Spec sigma2_;
    double eta_ = 0.0;
    double sigma_sup_ = 0.0;
    bool rd_bounds_ = false;
};

// The regression-discontinuity design is a DesignSpec with the strengthened
// one-sided bounds flag set.
using RdDesignSpec = DesignSpec;

// ---------------------------------------------------------------------------
// Regression functions.

class RegressionFunction {
public:
    enum class Kind { zero, constant, holder_alt, bump, user_grid };

    static RegressionFunction zero();
    static RegressionFunction constant(double b);
    // max{c [(log log n)/n]^{beta/(2 beta + 1)} - L |x|^beta, 0}; needs n >= 16
    // so log log n is positive.
    static RegressionFunction holder_alt(double beta, double L, double c, std::int64_t n);
    // max{b - L |x|^beta, 0}
    static RegressionFunction bump(double b, double beta, double L);
    // Piecewise-linear interpolation through (xs, gs); constant beyond the ends.
    static RegressionFunction user_grid(std::vector<double> xs, std::vector<double> gs);

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    double beta() const { return beta_; }
    double holder_l() const { return holder_l_; }
    double level() const { return level_; } // b (bump/constant) or c (holder_alt)

private:
    Kind kind_ = Kind::zero;
    double level_ = 0.0;    // b or c
    double beta_ = 1.0;
    double holder_l_ = 0.0; // L
    double height_ = 0.0;   // holder_alt: c [(log log n)/n]^{beta/(2 beta+1)}
    std::vector<double> grid_x_, grid_g_;
};

// ---------------------------------------------------------------------------
// Samples.

struct Sample {
    std::vector<double> x;
    std::vector<double> y;
    // Permutation ordering observations by |x| ascending, ties broken by x
    // ascending then input index: the fixed total order used everywhere.
    std::vector<std::uint32_t> order;

    std::size_t size() const { return x.size(); }

    // Validates finiteness and computes the cached order.
    static Sample from_xy(std::vector<double> x, std::vector<double> y);
};

// CSV with header "x,y"; values round-trip exactly.
Sample read_sample_csv(std::istream& in, const std::string& name = "<stream>");
void write_sample_csv(const Sample& s, std::ostream& out);

// ---------------------------------------------------------------------------
// p-value mixture.

enum class F1Kind { point_mass_at_zero, beta_like, holder_power };

struct MixtureSpec {
    double pi = 1.0;
    F1Kind f1_kind = F1Kind::point_mass_at_zero;
    // beta_like(a, b): density a b x^(a-1) (1-x)^(b-1) on [0,1]
    // (Kumaraswamy; decreasing for a <= 1 <= b, smooth on (0,1)).
    double a = 1.0;
    double b = 1.0;
    // holder_power(beta): density (beta+1) (1-x)^beta, the Sigma(beta+1, beta)
    // member used for the mixture alternatives.
    double beta = 1.0;

    void validate() const;
    double f1_density(double x) const; // point mass kind throws
    double fp_density(double x) const;
    double sample_f1(Rng& rng) const;

    static MixtureSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// ---------------------------------------------------------------------------
// Generators (pure functions of (arguments, seed)) and the design-frequency
// event.

Sample gen_regression_sample(std::size_t n, const RegressionFunction& g,
                             const DesignSpec& design, std::uint64_t seed);

std::vector<double> gen_pvalue_sample(std::size_t n, const MixtureSpec& mix,
                                      std::uint64_t seed);

// m_g(x) = g(x) sgn(x) - 2 g(0) I(x > 0) with sgn(x) = -1 for x <= 0, else 1.
// Satisfies m_g(x) + tau I(x > 0) = g(x) sgn(x) pointwise with tau = 2 g(0).
struct RdEmbedding {
    std::function<double(double)> m;
    double tau;
};
RdEmbedding rd_embed(const RegressionFunction& g);

// True iff  eta t / 2 <= (1/n) sum I(|X_i| <= t) <= 2 t / eta  for every t in
// ((log n)/n, eta).  The empirical count is a right-continuous step function,
// so checking the jump points and interval endpoints is exact.
bool check_an_event(const Sample& s, double eta);

} // namespace adaptest
