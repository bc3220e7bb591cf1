#pragma once
// Testing the interval null theta in [-delta, delta] with the t-ratio test,
// size controlled at |theta| = delta.

#include <cmath>
#include <cstdint>

#include "nonsig/errors.hpp"
#include "nonsig/normal_model.hpp"
#include "nonsig/numerics.hpp"

namespace nonsig {

struct IntervalNullDesign {
    std::int64_t n = 1;
    double delta = 0.0;
    double alpha = 0.05;
    double c = 0.0;  // solved critical value

    double sqrt_n() const { return std::sqrt(static_cast<double>(n)); }
    PointNullDesign as_point_design() const { return {n, c}; }
};

namespace detail {

inline void require_interval_arguments(std::int64_t n, double delta, double alpha,
                                       const char* who) {
    if (n < 1) throw PreconditionError(std::string(who) + ": n must be >= 1");
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw PreconditionError(std::string(who) + ": delta must be positive");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError(std::string(who) + ": alpha must lie in (0, 1)");
    }
}

}  // namespace detail

/// log of the size Phi(shift - c) + Phi(-shift - c) with shift = sqrt(n) delta.
inline double log_interval_size(double shift, double c) {
    return log_add_exp(detail::log_cdf_extended(shift - c), detail::log_cdf_extended(-shift - c));
}

/// Critical value c with Phi(sqrt(n) delta - c) + Phi(-sqrt(n) delta - c) = alpha.
///
/// The size is strictly decreasing in c. The root is searched on
/// [sqrt(n) delta, sqrt(n) delta + 10], where the size falls from about 1/2
/// to below 1e-23; for alpha >= 1/2 the bracket starts at 0 instead.
inline double solve_critical_value(std::int64_t n, double delta, double alpha) {
    detail::require_interval_arguments(n, delta, alpha, "solve_critical_value");
    const double shift = std::sqrt(static_cast<double>(n)) * delta;
    const double log_alpha = std::log(alpha);
    const Bracket bracket{alpha < 0.5 ? shift : 0.0, shift + 10.0};
    return find_root([&](double c) { return log_interval_size(shift, c) - log_alpha; }, bracket,
                     1e-13);
}

/// Phi^{-1}(1 - alpha) + sqrt(n) delta, accurate for large sqrt(n) delta.
inline double approximate_critical_value(std::int64_t n, double delta, double alpha) {
    detail::require_interval_arguments(n, delta, alpha, "approximate_critical_value");
    return std_normal_quantile(1.0 - alpha) + std::sqrt(static_cast<double>(n)) * delta;
}

inline IntervalNullDesign make_interval_null_design(std::int64_t n, double delta, double alpha) {
    return {n, delta, alpha, solve_critical_value(n, delta, alpha)};
}

inline double log_interval_rejection_probability(double theta, const IntervalNullDesign& design) {
    return log_event_likelihood(theta, design.as_point_design(), SignificanceEvent::Significant);
}

/// log Pr(sqrt(n)|theta_hat| <= c | theta); stays informative when the
/// rejection probability rounds to one.
inline double log_interval_acceptance_probability(double theta,
                                                  const IntervalNullDesign& design) {
    return log_event_likelihood(theta, design.as_point_design(), SignificanceEvent::NonSignificant);
}

inline double interval_rejection_probability(double theta, const IntervalNullDesign& design) {
    return std::exp(log_interval_rejection_probability(theta, design));
}

/// Finite-n posterior after the interval-null test.
inline ConditionalPosterior interval_posterior(const NormalPrior& prior,
                                               const IntervalNullDesign& design,
                                               bool significant) {
    return ConditionalPosterior(prior, design.as_point_design(),
                                significant ? SignificanceEvent::Significant
                                            : SignificanceEvent::NonSignificant);
}

/// Large-n limit of interval_posterior: the prior truncated to |theta| > delta
/// after significance, and to (-delta, delta) otherwise.
class TruncatedPrior {
public:
    TruncatedPrior(NormalPrior prior, double delta, bool outside)
        : prior_(prior), delta_(delta), outside_(outside) {
        prior.validate();
        const double inside_mass = std::exp(log_normal_interval_probability(
            (-delta - prior.mu) / prior.sigma, (delta - prior.mu) / prior.sigma));
        mass_ = outside ? 1.0 - inside_mass : inside_mass;
    }

    double density(double theta) const {
        const bool inside = std::abs(theta) < delta_;
        return inside == outside_ ? 0.0 : prior_.density(theta) / mass_;
    }

private:
    NormalPrior prior_;
    double delta_;
    bool outside_;
    double mass_ = 1.0;
};

inline TruncatedPrior interval_posterior_limit(const NormalPrior& prior, double delta,
                                               bool significant) {
    return TruncatedPrior(prior, delta, significant);
}

}  // namespace nonsig
