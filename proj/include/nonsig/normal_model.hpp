#pragma once
// Normal prior, Normal measurements with unit variance, and the two-sided
// t-ratio test sqrt(n)|theta_hat| > c. Posteriors conditional on the test
// outcome (optionally refined by the sign of theta_hat) are closed forms.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nonsig/errors.hpp"
#include "nonsig/numerics.hpp"

namespace nonsig {

struct NormalPrior {
    double mu = 0.0;
    double sigma = 1.0;

    void validate() const {
        if (!std::isfinite(mu)) throw PreconditionError("NormalPrior: mu must be finite");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw PreconditionError("NormalPrior: sigma must be positive and finite");
        }
    }

    double log_density(double theta) const {
        return log_std_normal_pdf((theta - mu) / sigma) - std::log(sigma);
    }
    double density(double theta) const { return std::exp(log_density(theta)); }
};

/// n unit-variance measurements; significant when sqrt(n)|theta_hat| > c.
/// c = 0 is accepted as the degenerate always-reject test.
struct PointNullDesign {
    std::int64_t n = 1;
    double c = 1.96;

    void validate() const {
        if (n < 1) throw PreconditionError("PointNullDesign: n must be >= 1");
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw PreconditionError("PointNullDesign: c must be finite and non-negative");
        }
    }
    double sqrt_n() const { return std::sqrt(static_cast<double>(n)); }
};

enum class SignificanceEvent {
    Significant,             // |t| > c
    NonSignificant,          // |t| <= c
    SignificantPositive,     // t > c
    NonSignificantPositive,  // 0 < t <= c
    SignificantNegative,     // t < -c
    NonSignificantNegative,  // -c <= t <= 0
};

inline constexpr std::array<SignificanceEvent, 2> kTwoWayPartition{
    SignificanceEvent::Significant, SignificanceEvent::NonSignificant};

inline constexpr std::array<SignificanceEvent, 4> kSignPartition{
    SignificanceEvent::SignificantPositive, SignificanceEvent::NonSignificantPositive,
    SignificanceEvent::SignificantNegative, SignificanceEvent::NonSignificantNegative};

inline std::string_view to_string(SignificanceEvent event) {
    switch (event) {
        case SignificanceEvent::Significant: return "significant";
        case SignificanceEvent::NonSignificant: return "nonsignificant";
        case SignificanceEvent::SignificantPositive: return "significant_positive";
        case SignificanceEvent::NonSignificantPositive: return "nonsignificant_positive";
        case SignificanceEvent::SignificantNegative: return "significant_negative";
        case SignificanceEvent::NonSignificantNegative: return "nonsignificant_negative";
    }
    return "unknown";
}

inline std::optional<SignificanceEvent> parse_significance_event(std::string_view name) {
    for (auto e : {SignificanceEvent::Significant, SignificanceEvent::NonSignificant,
                   SignificanceEvent::SignificantPositive,
                   SignificanceEvent::NonSignificantPositive,
                   SignificanceEvent::SignificantNegative,
                   SignificanceEvent::NonSignificantNegative}) {
        if (to_string(e) == name) return e;
    }
    return std::nullopt;
}

/// The event as a union of (at most two) intervals of the t-ratio sqrt(n)*theta_hat.
class EventRegion {
public:
    static EventRegion of(SignificanceEvent event, double c) {
        EventRegion r;
        switch (event) {
            case SignificanceEvent::Significant:
                r.add(kNegInf, -c);
                r.add(c, kPosInf);
                break;
            case SignificanceEvent::NonSignificant: r.add(-c, c); break;
            case SignificanceEvent::SignificantPositive: r.add(c, kPosInf); break;
            case SignificanceEvent::NonSignificantPositive: r.add(0.0, c); break;
            case SignificanceEvent::SignificantNegative: r.add(kNegInf, -c); break;
            case SignificanceEvent::NonSignificantNegative: r.add(-c, 0.0); break;
        }
        return r;
    }

    std::span<const Interval> parts() const { return {parts_.data(), count_}; }

    /// Half-open membership test matching the event definitions above.
    static bool contains(SignificanceEvent event, double t, double c) {
        switch (event) {
            case SignificanceEvent::Significant: return std::abs(t) > c;
            case SignificanceEvent::NonSignificant: return std::abs(t) <= c;
            case SignificanceEvent::SignificantPositive: return t > c;
            case SignificanceEvent::NonSignificantPositive: return t > 0.0 && t <= c;
            case SignificanceEvent::SignificantNegative: return t < -c;
            case SignificanceEvent::NonSignificantNegative: return t >= -c && t <= 0.0;
        }
        return false;
    }

    /// log Pr(t in region) for t ~ N(location, scale^2).
    double log_probability(double location, double scale) const {
        double acc = kNegInf;
        for (const auto& part : parts()) {
            acc = log_add_exp(acc, log_normal_interval_probability((part.lo - location) / scale,
                                                                   (part.hi - location) / scale));
        }
        return acc;
    }

    /// Finite interval endpoints, for quadrature breakpoints.
    std::vector<double> finite_edges() const {
        std::vector<double> edges;
        for (const auto& part : parts()) {
            if (std::isfinite(part.lo)) edges.push_back(part.lo);
            if (std::isfinite(part.hi)) edges.push_back(part.hi);
        }
        return edges;
    }

private:
    void add(double lo, double hi) { parts_[count_++] = {lo, hi}; }

    std::array<Interval, 2> parts_{};
    std::size_t count_ = 0;
};

/// log Pr(event | theta): t ~ N(sqrt(n) theta, 1).
inline double log_event_likelihood(double theta, const PointNullDesign& design,
                                   SignificanceEvent event) {
    detail::require_finite(theta, "log_event_likelihood");
    return EventRegion::of(event, design.c).log_probability(design.sqrt_n() * theta, 1.0);
}

/// log Pr(event) under the prior predictive t ~ N(sqrt(n) mu, 1 + n sigma^2).
inline double log_event_probability(const NormalPrior& prior, const PointNullDesign& design,
                                    SignificanceEvent event) {
    prior.validate();
    design.validate();
    const double n = static_cast<double>(design.n);
    const double scale = std::sqrt(1.0 + n * prior.sigma * prior.sigma);
    return EventRegion::of(event, design.c).log_probability(design.sqrt_n() * prior.mu, scale);
}

/// Phi(sqrt(n) theta - c) + Phi(-sqrt(n) theta - c).
inline double rejection_probability_given_theta(double theta, const PointNullDesign& design) {
    design.validate();
    return std::exp(log_event_likelihood(theta, design, SignificanceEvent::Significant));
}

/// Prior-predictive probability of significance, in closed form.
inline double marginal_rejection_probability(const NormalPrior& prior,
                                             const PointNullDesign& design) {
    return std::exp(log_event_probability(prior, design, SignificanceEvent::Significant));
}

/// Density of theta conditional on a test event, together with the event's
/// prior-predictive probability. Evaluation is reentrant.
class ConditionalPosterior {
public:
    inline static constexpr double kMinEventProbability = 1e-300;

    ConditionalPosterior(NormalPrior prior, PointNullDesign design, SignificanceEvent event)
        : prior_(prior), design_(design), event_(event),
          region_(EventRegion::of(event, design.c)) {
        log_event_probability_ = nonsig::log_event_probability(prior, design, event);
        if (!(log_event_probability_ >= std::log(kMinEventProbability))) {
            throw DegenerateConditioningError(
                "posterior_given_event: probability of '" + std::string(to_string(event)) +
                    "' is below 1e-300",
                log_event_probability_);
        }
    }

    const NormalPrior& prior() const noexcept { return prior_; }
    const PointNullDesign& design() const noexcept { return design_; }
    SignificanceEvent event() const noexcept { return event_; }

    double event_probability() const { return std::exp(log_event_probability_); }
    double log_event_probability() const noexcept { return log_event_probability_; }

    double log_likelihood(double theta) const {
        detail::require_finite(theta, "ConditionalPosterior");
        return region_.log_probability(design_.sqrt_n() * theta, 1.0);
    }
    double likelihood(double theta) const { return std::exp(log_likelihood(theta)); }

    double log_density(double theta) const {
        return prior_.log_density(theta) + log_likelihood(theta) - log_event_probability_;
    }
    double density(double theta) const { return std::exp(log_density(theta)); }
    double operator()(double theta) const { return density(theta); }

    /// Prior mean +- 10 sd, widened so the 1/sqrt(n)-scale transitions at the
    /// critical values are always inside.
    Interval support_hint() const {
        const double reach = (design_.c + 6.0) / design_.sqrt_n();
        return {std::min(prior_.mu - 10.0 * prior_.sigma, -reach),
                std::max(prior_.mu + 10.0 * prior_.sigma, reach)};
    }

    /// Points bracketing the likelihood transitions, for quadrature.
    std::vector<double> breakpoints() const {
        std::vector<double> points{prior_.mu};
        const double root_n = design_.sqrt_n();
        for (double edge : region_.finite_edges()) {
            for (double k : {-8.0, -3.0, 0.0, 3.0, 8.0}) points.push_back((edge + k) / root_n);
        }
        return points;
    }

    /// Posterior probability of `range`, by quadrature.
    double mass(Interval range, const QuadratureSpec& spec = {}) const {
        const Interval hint = support_hint();
        const Interval clipped{std::max(range.lo, hint.lo), std::min(range.hi, hint.hi)};
        if (!(clipped.lo < clipped.hi)) return 0.0;
        const auto points = breakpoints();
        return integrate([this](double t) { return density(t); }, clipped, spec, points);
    }

private:
    NormalPrior prior_;
    PointNullDesign design_;
    SignificanceEvent event_;
    EventRegion region_;
    double log_event_probability_ = 0.0;
};

inline ConditionalPosterior posterior_given_event(const NormalPrior& prior,
                                                  const PointNullDesign& design,
                                                  SignificanceEvent event) {
    return ConditionalPosterior(prior, design, event);
}

struct FullInfoPosterior {
    double mu_n = 0.0;
    double sigma_n = 1.0;

    double density(double theta) const {
        return std::exp(log_std_normal_pdf((theta - mu_n) / sigma_n)) / sigma_n;
    }
};

/// Conjugate update with n unit-variance measurements averaging theta_hat.
inline FullInfoPosterior full_information_posterior(const NormalPrior& prior, std::int64_t n,
                                                    double theta_hat) {
    prior.validate();
    if (n < 1) throw PreconditionError("full_information_posterior: n must be >= 1");
    detail::require_finite(theta_hat, "full_information_posterior");
    const double nd = static_cast<double>(n);
    const double var = prior.sigma * prior.sigma;
    const double precision_ratio = 1.0 + nd * var;
    return {(prior.mu + nd * var * theta_hat) / precision_ratio,
            prior.sigma / std::sqrt(precision_ratio)};
}

/// A real number or +infinity, kept distinct from floating-point overflow.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) { return ExtendedReal(v, false); }
    static ExtendedReal positive_infinity() { return ExtendedReal(0.0, true); }

    bool is_infinite() const noexcept { return infinite_; }
    /// The finite value; throws for the infinite sentinel.
    double value() const {
        if (infinite_) throw DomainError("ExtendedReal: value() of +infinity");
        return value_;
    }
    double as_double() const noexcept { return infinite_ ? kPosInf : value_; }

    friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

private:
    ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_;
    bool infinite_;
};

/// n -> infinity limit of p(theta | t > c) / p(theta).
inline ExtendedReal sign_ratio_limit_significant(const NormalPrior& prior, double c,
                                                 double theta) {
    prior.validate();
    if (!(c > 0.0)) throw PreconditionError("sign_ratio_limit_significant: c must be positive");
    detail::require_finite(theta, "sign_ratio_limit_significant");
    if (theta < 0.0) return ExtendedReal::finite(0.0);
    const double log_prob_positive = log_std_normal_cdf(prior.mu / prior.sigma);
    if (theta == 0.0) {
        return ExtendedReal::finite(std::exp(log_std_normal_cdf(-c) - log_prob_positive));
    }
    return ExtendedReal::finite(std::exp(-log_prob_positive));
}

/// n -> infinity limit of p(theta | 0 < t <= c) / p(theta).
inline ExtendedReal sign_ratio_limit_nonsignificant(double theta) {
    detail::require_finite(theta, "sign_ratio_limit_nonsignificant");
    return theta == 0.0 ? ExtendedReal::positive_infinity() : ExtendedReal::finite(0.0);
}

}  // namespace nonsig
