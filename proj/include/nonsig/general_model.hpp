#pragma once
// Priors with an optional atom at zero, tests described only by their
// asymptotic size and Type II error curve, finite-n posteriors by quadrature,
// and the large-n limit formulas.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "nonsig/errors.hpp"
#include "nonsig/normal_model.hpp"
#include "nonsig/numerics.hpp"

namespace nonsig {

/// Probability q at theta = 0 plus (1 - q) times a continuous density.
///
/// The density callable must be reentrant. A quantile function for the
/// continuous component is optional and only needed for simulation.
class MixedPrior {
public:
    using Density = std::function<double(double)>;
    using Quantile = std::function<double(double)>;

    MixedPrior(double q, Density continuous_density, Interval continuous_support,
               Quantile continuous_quantile = {}, std::vector<double> breakpoints = {},
               const QuadratureSpec& spec = {})
        : q_(q), density_(std::move(continuous_density)), support_(continuous_support),
          quantile_(std::move(continuous_quantile)), breakpoints_(std::move(breakpoints)) {
        if (!(q_ >= 0.0 && q_ < 1.0)) throw PreconditionError("MixedPrior: q must lie in [0, 1)");
        if (!density_) throw PreconditionError("MixedPrior: continuous density is empty");
        if (!(support_.lo < support_.hi) || !std::isfinite(support_.lo) ||
            !std::isfinite(support_.hi)) {
            throw PreconditionError("MixedPrior: support must be a finite interval");
        }
        if (!support_.contains(0.0) || !(density_(0.0) > 0.0)) {
            throw PreconditionError("MixedPrior: continuous density must be positive at 0");
        }
        const double total = integrate(density_, support_, spec, breakpoints_);
        if (std::abs(total - 1.0) > 1e-6) {
            throw PreconditionError("MixedPrior: continuous density integrates to " +
                                    std::to_string(total) + ", not 1");
        }
    }

    /// Atom q at zero plus N(mu, sigma^2) on mu +- 10 sigma.
    static MixedPrior normal(double q, double mu, double sigma) {
        const NormalPrior base{mu, sigma};
        base.validate();
        return MixedPrior(
            q, [base](double t) { return base.density(t); }, tail_window(mu, sigma),
            [base](double u) { return base.mu + base.sigma * std_normal_quantile(u); },
            {mu});
    }

    static MixedPrior from(const NormalPrior& prior) { return normal(0.0, prior.mu, prior.sigma); }

    double q() const noexcept { return q_; }
    double continuous_density(double theta) const {
        return support_.contains(theta) ? density_(theta) : 0.0;
    }
    Interval continuous_support() const noexcept { return support_; }
    std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    bool can_sample() const noexcept { return static_cast<bool>(quantile_); }

    /// Continuous-component draw from a uniform in (0, 1).
    double continuous_quantile(double u) const {
        if (!quantile_) throw PreconditionError("MixedPrior: no quantile function for sampling");
        return quantile_(u);
    }

private:
    double q_;
    Density density_;
    Interval support_;
    Quantile quantile_;
    std::vector<double> breakpoints_;
};

/// A test known through its asymptotic size alpha and its Type II error
/// curve beta_n(theta) = Pr(T_n <= c | theta).
///
/// Curves are expected to have imperfect local asymptotic power
/// (integral of liminf beta_n(z / sqrt n) dz > 0). This is not validated;
/// see local_power_diagnostic.
class TestPowerCurve {
public:
    using Type2 = std::function<double(double theta, std::int64_t n)>;
    using FeaturePoints = std::function<std::vector<double>(std::int64_t n)>;

    TestPowerCurve(double alpha, Type2 type2, Type2 log_type2 = {}, Type2 log_power = {},
                   FeaturePoints feature_points = {})
        : alpha_(alpha), type2_(std::move(type2)), log_type2_(std::move(log_type2)),
          log_power_(std::move(log_power)), feature_points_(std::move(feature_points)) {
        if (!(alpha_ > 0.0 && alpha_ < 1.0)) {
            throw PreconditionError("TestPowerCurve: alpha must lie in (0, 1)");
        }
        if (!type2_) throw PreconditionError("TestPowerCurve: type2 curve is empty");
    }

    double alpha() const noexcept { return alpha_; }

    double type2_at(double theta, std::int64_t n) const { return type2_(theta, n); }

    double log_type2_at(double theta, std::int64_t n) const {
        return log_type2_ ? log_type2_(theta, n) : std::log(type2_(theta, n));
    }

    double log_power_at(double theta, std::int64_t n) const {
        return log_power_ ? log_power_(theta, n) : log1m_exp(log_type2_at(theta, n));
    }

    /// Points where beta_n changes quickly, for quadrature.
    std::vector<double> feature_points(std::int64_t n) const {
        return feature_points_ ? feature_points_(n) : std::vector<double>{0.0};
    }

private:
    double alpha_;
    Type2 type2_;
    Type2 log_type2_;
    Type2 log_power_;
    FeaturePoints feature_points_;
};

/// The two-sided t-ratio test of normal_model as a power curve.
inline TestPowerCurve normal_power_curve(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw PreconditionError("normal_power_curve: c must be positive");
    }
    auto log_type2 = [c](double theta, std::int64_t n) {
        return log_event_likelihood(theta, PointNullDesign{n, c}, SignificanceEvent::NonSignificant);
    };
    auto log_power = [c](double theta, std::int64_t n) {
        return log_event_likelihood(theta, PointNullDesign{n, c}, SignificanceEvent::Significant);
    };
    auto type2 = [log_type2](double theta, std::int64_t n) {
        return std::exp(log_type2(theta, n));
    };
    auto features = [c](std::int64_t n) {
        const double root_n = std::sqrt(static_cast<double>(n));
        std::vector<double> points{0.0};
        for (double edge : {-c, c}) {
            for (double k : {-8.0, -3.0, 0.0, 3.0, 8.0}) points.push_back((edge + k) / root_n);
        }
        return points;
    };
    return TestPowerCurve(2.0 * std_normal_cdf(-c), type2, log_type2, log_power, features);
}

namespace detail {

inline void require_sample_size(std::int64_t n, const char* who) {
    if (n < 1) throw PreconditionError(std::string(who) + ": n must be >= 1");
}

inline std::vector<double> merged_breakpoints(const MixedPrior& prior,
                                              const TestPowerCurve& curve, std::int64_t n) {
    std::vector<double> points = curve.feature_points(n);
    points.insert(points.end(), prior.breakpoints().begin(), prior.breakpoints().end());
    return points;
}

// Continuous-component integrals of the power and of the Type II error.
struct ContinuousEventMasses {
    double significant;
    double nonsignificant;
};

inline ContinuousEventMasses continuous_event_masses(const MixedPrior& prior,
                                                     const TestPowerCurve& curve,
                                                     std::int64_t n,
                                                     const QuadratureSpec& spec) {
    const auto points = merged_breakpoints(prior, curve, n);
    const double sig = integrate(
        [&](double t) {
            return std::exp(curve.log_power_at(t, n)) * prior.continuous_density(t);
        },
        prior.continuous_support(), spec, points);
    const double nonsig = integrate(
        [&](double t) {
            return std::exp(curve.log_type2_at(t, n)) * prior.continuous_density(t);
        },
        prior.continuous_support(), spec, points);
    return {sig, nonsig};
}

}  // namespace detail

/// Pr(T_n > c) = q (1 - beta_n(0)) + (1 - q) * integral of (1 - beta_n) p.
inline double marginal_significance_probability(const MixedPrior& prior,
                                                const TestPowerCurve& curve, std::int64_t n,
                                                const QuadratureSpec& spec = {}) {
    detail::require_sample_size(n, "marginal_significance_probability");
    const auto masses = detail::continuous_event_masses(prior, curve, n, spec);
    return prior.q() * std::exp(curve.log_power_at(0.0, n)) + (1.0 - prior.q()) * masses.significant;
}

/// Finite-n posterior after a test outcome: an atom at zero plus a density.
class MixedPosterior {
public:
    MixedPosterior(MixedPrior prior, TestPowerCurve curve, std::int64_t n, bool significant,
                   const QuadratureSpec& spec = {})
        : prior_(std::move(prior)), curve_(std::move(curve)), n_(n), significant_(significant) {
        detail::require_sample_size(n, "MixedPosterior");
        const auto masses = detail::continuous_event_masses(prior_, curve_, n_, spec);
        const double q = prior_.q();
        const double atom_likelihood = std::exp(log_likelihood(0.0));
        const double atom_part = q * atom_likelihood;
        const double continuous_part =
            (1.0 - q) * (significant ? masses.significant : masses.nonsignificant);
        event_probability_ = atom_part + continuous_part;
        if (!(event_probability_ >= ConditionalPosterior::kMinEventProbability)) {
            throw DegenerateConditioningError(
                std::string("MixedPosterior: probability of ") +
                    (significant ? "significance" : "non-significance") + " underflows",
                std::log(event_probability_));
        }
        mass_at_zero_ = atom_part / event_probability_;
    }

    double mass_at_zero() const noexcept { return mass_at_zero_; }
    double event_probability() const noexcept { return event_probability_; }
    bool significant() const noexcept { return significant_; }
    std::int64_t n() const noexcept { return n_; }
    const MixedPrior& prior() const noexcept { return prior_; }

    double log_likelihood(double theta) const {
        return significant_ ? curve_.log_power_at(theta, n_) : curve_.log_type2_at(theta, n_);
    }

    /// Density of the continuous part; integrates to 1 - mass_at_zero().
    double continuous_density(double theta) const {
        const double p = prior_.continuous_density(theta);
        if (p == 0.0) return 0.0;
        return (1.0 - prior_.q()) * std::exp(log_likelihood(theta)) * p / event_probability_;
    }

    std::vector<double> breakpoints() const {
        return detail::merged_breakpoints(prior_, curve_, n_);
    }

    double continuous_mass(Interval range, const QuadratureSpec& spec = {}) const {
        const Interval support = prior_.continuous_support();
        const Interval clipped{std::max(range.lo, support.lo), std::min(range.hi, support.hi)};
        if (!(clipped.lo < clipped.hi)) return 0.0;
        const auto points = breakpoints();
        return integrate([this](double t) { return continuous_density(t); }, clipped, spec,
                         points);
    }

    double continuous_mass(const QuadratureSpec& spec = {}) const {
        return continuous_mass(prior_.continuous_support(), spec);
    }

private:
    MixedPrior prior_;
    TestPowerCurve curve_;
    std::int64_t n_;
    bool significant_;
    double event_probability_ = 0.0;
    double mass_at_zero_ = 0.0;
};

inline MixedPosterior posterior_given_significance(const MixedPrior& prior,
                                                   const TestPowerCurve& curve, std::int64_t n,
                                                   const QuadratureSpec& spec = {}) {
    return MixedPosterior(prior, curve, n, true, spec);
}

inline MixedPosterior posterior_given_nonsignificance(const MixedPrior& prior,
                                                      const TestPowerCurve& curve,
                                                      std::int64_t n,
                                                      const QuadratureSpec& spec = {}) {
    return MixedPosterior(prior, curve, n, false, spec);
}

// ---------------------------------------------------------------------------
// Large-n limits

namespace detail {
inline void require_limit_arguments(double q, double alpha, const char* who) {
    if (!(q >= 0.0 && q < 1.0)) throw PreconditionError(std::string(who) + ": q must lie in [0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError(std::string(who) + ": alpha must lie in (0, 1)");
    }
}
}  // namespace detail

/// lim Pr(T_n > c) = q alpha + (1 - q).
inline double limiting_significance_probability(double q, double alpha) {
    detail::require_limit_arguments(q, alpha, "limiting_significance_probability");
    return q * alpha + (1.0 - q);
}

/// lim p(0 | T_n > c) for an atom of size q: q alpha / (q alpha + 1 - q).
inline double limiting_mass_at_zero_given_significance(double q, double alpha) {
    return q * alpha / limiting_significance_probability(q, alpha);
}

/// Limiting posterior-to-prior density ratio at theta != 0 after significance.
inline double significance_ratio_limit(double q, double alpha) {
    return 1.0 / limiting_significance_probability(q, alpha);
}

/// Smallest q for which significance at least doubles the density away from 0.
inline double doubling_threshold(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw PreconditionError("doubling_threshold: alpha must lie in (0, 0.5)");
    }
    return 1.0 / (2.0 * (1.0 - alpha));
}

/// Large-deviation rate d_theta = lim -(1/n) log beta_n(theta).
///
/// Fits -(1/n) log beta_n(theta) = d + a / sqrt(n) + b / n by least squares
/// over the grid and returns d. beta_n is evaluated in log space.
inline double decay_rate_estimate(const TestPowerCurve& curve, double theta,
                                  std::span<const std::int64_t> n_grid) {
    detail::require_finite(theta, "decay_rate_estimate");
    if (theta == 0.0) throw PreconditionError("decay_rate_estimate: theta must be nonzero");
    if (n_grid.size() < 3) throw PreconditionError("decay_rate_estimate: need >= 3 grid points");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
            throw PreconditionError("decay_rate_estimate: n_grid must be positive and increasing");
        }
    }

    // Normal equations for the 3-parameter fit.
    double ata[3][3] = {};
    double aty[3] = {};
    for (std::int64_t n : n_grid) {
        const double nd = static_cast<double>(n);
        const double row[3] = {1.0, 1.0 / std::sqrt(nd), 1.0 / nd};
        const double y = -curve.log_type2_at(theta, n) / nd;
        if (!std::isfinite(y)) throw DomainError("decay_rate_estimate: non-finite log beta_n");
        for (int i = 0; i < 3; ++i) {
            aty[i] += row[i] * y;
            for (int j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(ata[r][col]) > std::abs(ata[pivot][col])) pivot = r;
        }
        std::swap(ata[col], ata[pivot]);
        std::swap(aty[col], aty[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double factor = ata[r][col] / ata[col][col];
            for (int k = col; k < 3; ++k) ata[r][k] -= factor * ata[col][k];
            aty[r] -= factor * aty[col];
        }
    }
    double coef[3];
    for (int r = 2; r >= 0; --r) {
        double acc = aty[r];
        for (int k = r + 1; k < 3; ++k) acc -= ata[r][k] * coef[k];
        coef[r] = acc / ata[r][r];
    }
    return coef[0];
}

struct LocalPowerDiagnostic {
    double integral = 0.0;  // integral of beta_n(z / sqrt n) dz
    bool suspect_perfect_local_power = false;
};

/// Evaluates the local Type II integral at sample size n and flags curves
/// whose value is below 1e-6.
inline LocalPowerDiagnostic local_power_diagnostic(const TestPowerCurve& curve, std::int64_t n,
                                                   double z_halfwidth = 50.0,
                                                   const QuadratureSpec& spec = {}) {
    detail::require_sample_size(n, "local_power_diagnostic");
    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<double> points;
    for (double t : curve.feature_points(n)) points.push_back(t * root_n);
    const double value = integrate(
        [&](double z) { return std::exp(curve.log_type2_at(z / root_n, n)); },
        Interval{-z_halfwidth, z_halfwidth}, spec, points);
    return {value, value < 1e-6};
}

}  // namespace nonsig
