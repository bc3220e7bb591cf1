#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "nonsig/normal_model.hpp"

using namespace nonsig;

namespace {

constexpr SignificanceEvent kAll[] = {
    SignificanceEvent::Significant,         SignificanceEvent::NonSignificant,
    SignificanceEvent::SignificantPositive, SignificanceEvent::NonSignificantPositive,
    SignificanceEvent::SignificantNegative, SignificanceEvent::NonSignificantNegative};

const NormalPrior kFig1Prior{1.0, 1.0};
const PointNullDesign kFig1Design{10, 1.96};

// Plain composite trapezoid on a uniform grid; test-only oracle.
template <class F>
double fine_trapezoid(F f, double lo, double hi, int intervals) {
    const double h = (hi - lo) / intervals;
    double acc = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < intervals; ++i) acc += f(lo + i * h);
    return acc * h;
}

}  // namespace

TEST(Types, Validation) {
    EXPECT_THROW((NormalPrior{0.0, 0.0}.validate()), PreconditionError);
    EXPECT_THROW((NormalPrior{0.0, -1.0}.validate()), PreconditionError);
    EXPECT_THROW((PointNullDesign{0, 1.96}.validate()), PreconditionError);
    EXPECT_THROW((PointNullDesign{10, -1.0}.validate()), PreconditionError);
    EXPECT_NO_THROW((PointNullDesign{10, 0.0}.validate()));
}

TEST(Events, NamesRoundTrip) {
    for (auto e : kAll) EXPECT_EQ(parse_significance_event(to_string(e)), e);
    EXPECT_FALSE(parse_significance_event("maybe").has_value());
}

TEST(RejectionProbability, AtTheNull) {
    for (std::int64_t n : {1, 10, 1000}) {
        EXPECT_NEAR(rejection_probability_given_theta(0.0, {n, 1.96}), 0.05, 1e-4);
        EXPECT_NEAR(rejection_probability_given_theta(0.0, {n, 1.96}),
                    2.0 * std_normal_cdf(-1.96), 1e-15);
    }
    EXPECT_EQ(rejection_probability_given_theta(0.0, {10, 0.0}), 1.0);
}

TEST(RejectionProbability, EvenAndMinimizedAtZero) {
    const PointNullDesign d{25, 1.96};
    const double at_zero = rejection_probability_given_theta(0.0, d);
    for (double t = 0.01; t < 3.0; t += 0.07) {
        EXPECT_DOUBLE_EQ(rejection_probability_given_theta(t, d),
                         rejection_probability_given_theta(-t, d));
        EXPECT_GT(rejection_probability_given_theta(t, d), at_zero);
    }
}

TEST(RejectionProbability, MatchesMonteCarlo) {
    const double analytic = rejection_probability_given_theta(1.0, kFig1Design);
    // mpmath reference 0.88537216629154657...
    EXPECT_NEAR(analytic, 0.8853721662915466, 1e-13);

    std::mt19937_64 gen(1);
    std::normal_distribution<double> theta_hat(1.0, 1.0 / std::sqrt(10.0));
    const int draws = 10'000'000;
    int hits = 0;
    for (int i = 0; i < draws; ++i) hits += std::sqrt(10.0) * std::abs(theta_hat(gen)) > 1.96;
    const double p = static_cast<double>(hits) / draws;
    EXPECT_NEAR(analytic, p, 4.0 * std::sqrt(p * (1.0 - p) / draws));
}

TEST(MarginalRejection, HeadlineValue) {
    EXPECT_NEAR(marginal_rejection_probability(kFig1Prior, kFig1Design), 0.7028, 5e-5);
    // mpmath reference 0.70275364541441017...
    EXPECT_NEAR(marginal_rejection_probability(kFig1Prior, kFig1Design), 0.7027536454144102,
                1e-13);
}

TEST(MarginalRejection, TendsToOneForLargeN) {
    EXPECT_GT(marginal_rejection_probability({0.0, 1.0}, {100'000'000, 1.96}), 0.999);
}

TEST(MarginalRejection, PriorPredictiveMonteCarlo) {
    const double analytic = marginal_rejection_probability({0.0, 1.0}, {1, 1.96});
    EXPECT_NEAR(analytic, 2.0 * std_normal_cdf(-1.96 / std::sqrt(2.0)), 1e-15);
    EXPECT_NEAR(analytic, 0.1659, 2e-4);

    std::mt19937_64 gen(2);
    std::normal_distribution<double> z;
    const int draws = 10'000'000;
    int hits = 0;
    for (int i = 0; i < draws; ++i) {
        const double theta = z(gen);
        hits += std::abs(theta + z(gen)) > 1.96;
    }
    const double p = static_cast<double>(hits) / draws;
    EXPECT_NEAR(analytic, p, 4.0 * std::sqrt(p * (1.0 - p) / draws));
}

TEST(MarginalRejection, FootnoteIdentityAgainstQuadrature) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> mu(-2.0, 2.0), sigma(0.2, 3.0), c(0.5, 3.0);
    std::uniform_int_distribution<std::int64_t> n(1, 10000);
    for (int i = 0; i < 20; ++i) {
        const NormalPrior prior{mu(gen), sigma(gen)};
        const PointNullDesign design{n(gen), c(gen)};
        const ConditionalPosterior post(prior, design, SignificanceEvent::Significant);
        const double quad = integrate(
            [&](double t) { return rejection_probability_given_theta(t, design) * prior.density(t); },
            post.support_hint(), {}, post.breakpoints());
        EXPECT_NEAR(quad, marginal_rejection_probability(prior, design), 1e-8);
    }
}

TEST(MarginalRejection, MonotoneInCAndN) {
    double prev = 1.0;
    for (double c = 0.0; c <= 5.0; c += 0.05) {
        const double v = marginal_rejection_probability(kFig1Prior, {10, c});
        EXPECT_LE(v, prev);
        prev = v;
    }
    for (NormalPrior prior : {NormalPrior{1.0, 1.0}, NormalPrior{-0.5, 0.5}, NormalPrior{0.3, 2.0}}) {
        double last = 0.0;
        for (double ln = 0.0; ln <= 7.0; ln += 0.05) {
            const auto n = static_cast<std::int64_t>(std::round(std::pow(10.0, ln)));
            const double v = marginal_rejection_probability(prior, {n, 1.96});
            EXPECT_GE(v, last - 1e-15) << n;
            last = v;
        }
    }
}

TEST(Posterior, SignificantDensityAtZero) {
    const auto post = posterior_given_event(kFig1Prior, kFig1Design, SignificanceEvent::Significant);
    const double expected = std_normal_pdf(1.0) * 2.0 * std_normal_cdf(-1.96) /
                            marginal_rejection_probability(kFig1Prior, kFig1Design);
    EXPECT_NEAR(post.density(0.0), expected, 1e-15);
    // mpmath reference 0.017214450156004685...
    EXPECT_NEAR(post.density(0.0), 0.017214450156004685, 1e-14);
}

TEST(Posterior, SignRefinedProbabilitiesPartition) {
    double total = 0.0;
    for (auto e : kSignPartition) total += posterior_given_event(kFig1Prior, kFig1Design, e).event_probability();
    EXPECT_NEAR(total, 1.0, 1e-14);
    const double sig = posterior_given_event(kFig1Prior, kFig1Design, SignificanceEvent::Significant)
                           .event_probability();
    const double refined =
        posterior_given_event(kFig1Prior, kFig1Design, SignificanceEvent::SignificantPositive)
            .event_probability() +
        posterior_given_event(kFig1Prior, kFig1Design, SignificanceEvent::SignificantNegative)
            .event_probability();
    EXPECT_NEAR(sig, refined, 1e-15);
}

TEST(Posterior, NonSignificantPositiveMatchesDisplayedForm) {
    const auto post =
        posterior_given_event(kFig1Prior, kFig1Design, SignificanceEvent::NonSignificantPositive);
    const double root_n = std::sqrt(10.0);
    const double s = std::sqrt(11.0);
    const double pr = 1.0 - std_normal_cdf((root_n - 1.96) / s) - std_normal_cdf(-root_n / s);
    EXPECT_NEAR(post.event_probability(), pr, 1e-14);
    for (double t : {-1.0, 0.0, 0.3, 2.0}) {
        const double lik = 1.0 - std_normal_cdf(root_n * t - 1.96) - std_normal_cdf(-root_n * t);
        EXPECT_NEAR(post.density(t), kFig1Prior.density(t) * lik / pr, 1e-13);
    }
}

TEST(Posterior, DegenerateConditioning) {
    // c = 0 rejects almost surely, so non-significance has probability zero.
    EXPECT_THROW(posterior_given_event({0.0, 1.0}, {10, 0.0}, SignificanceEvent::NonSignificant),
                 DegenerateConditioningError);
    EXPECT_THROW(posterior_given_event({40.0, 0.1}, {10000, 1.96}, SignificanceEvent::SignificantNegative),
                 DegenerateConditioningError);
}

TEST(Posterior, NormalizationProperty) {
    const NormalPrior priors[] = {{1.0, 1.0}, {0.0, 1.0}, {-2.0, 0.5}, {0.5, 3.0}};
    const PointNullDesign designs[] = {{1, 1.96}, {10, 1.96}, {1000, 2.576}, {1'000'000, 1.96}};
    for (const auto& prior : priors) {
        for (const auto& design : designs) {
            for (auto e : kAll) {
                const auto post = posterior_given_event(prior, design, e);
                EXPECT_NEAR(post.mass(post.support_hint()), 1.0, 1e-6)
                    << prior.mu << ' ' << design.n << ' ' << to_string(e);
            }
        }
    }
}

TEST(Posterior, BayesConsistencyProperty) {
    const PointNullDesign design{50, 1.96};
    const NormalPrior prior{0.4, 0.8};
    for (auto e : kAll) {
        const auto post = posterior_given_event(prior, design, e);
        for (int i = 0; i < 1000; ++i) {
            const double t = -3.0 + 6.0 * i / 999.0;
            const double lhs = post.density(t) * post.event_probability();
            const double rhs = std::exp(log_event_likelihood(t, design, e)) * prior.density(t);
            EXPECT_NEAR(lhs, rhs, 1e-10 * rhs) << to_string(e) << ' ' << t;
        }
    }
}

TEST(Posterior, MixtureIdentityProperty) {
    const NormalPrior prior = kFig1Prior;
    for (const PointNullDesign design : {kFig1Design, PointNullDesign{10000, 1.96}}) {
        std::vector<ConditionalPosterior> two, four;
        for (auto e : kTwoWayPartition) two.push_back(posterior_given_event(prior, design, e));
        for (auto e : kSignPartition) four.push_back(posterior_given_event(prior, design, e));
        for (double t = -3.0; t <= 5.0; t += 0.01) {
            double sum2 = 0.0, sum4 = 0.0;
            for (const auto& p : two) sum2 += p.event_probability() * p.density(t);
            for (const auto& p : four) sum4 += p.event_probability() * p.density(t);
            EXPECT_NEAR(sum2, prior.density(t), 1e-10);
            EXPECT_NEAR(sum4, prior.density(t), 1e-10);
        }
    }
}

TEST(Posterior, SymmetryProperty) {
    const NormalPrior prior{0.0, 1.3};
    const PointNullDesign design{40, 1.96};
    const auto sig = posterior_given_event(prior, design, SignificanceEvent::Significant);
    const auto nonsig = posterior_given_event(prior, design, SignificanceEvent::NonSignificant);
    const auto pos = posterior_given_event(prior, design, SignificanceEvent::SignificantPositive);
    const auto neg = posterior_given_event(prior, design, SignificanceEvent::SignificantNegative);
    const auto npos = posterior_given_event(prior, design, SignificanceEvent::NonSignificantPositive);
    const auto nneg = posterior_given_event(prior, design, SignificanceEvent::NonSignificantNegative);
    for (double t = 0.0; t < 4.0; t += 0.037) {
        EXPECT_NEAR(sig.density(t), sig.density(-t), 1e-14);
        EXPECT_NEAR(nonsig.density(t), nonsig.density(-t), 1e-14);
        EXPECT_NEAR(pos.density(t), neg.density(-t), 1e-14);
        EXPECT_NEAR(npos.density(t), nneg.density(-t), 1e-14);
    }
}

TEST(Posterior, LargeNConcentrationAfterNonSignificance) {
    auto sd = [](const ConditionalPosterior& p) {
        const auto hint = p.support_hint();
        const auto points = p.breakpoints();
        const double m1 = integrate([&](double t) { return t * p.density(t); }, hint, {}, points);
        const double m2 = integrate([&](double t) { return t * t * p.density(t); }, hint, {}, points);
        return std::sqrt(m2 - m1 * m1);
    };
    const auto small = posterior_given_event(kFig1Prior, {100, 1.96}, SignificanceEvent::NonSignificant);
    const auto large = posterior_given_event(kFig1Prior, {10000, 1.96}, SignificanceEvent::NonSignificant);
    EXPECT_LT(sd(large), sd(small));
    EXPECT_GT(large.mass({-0.1, 0.1}), 0.99);
}

TEST(Posterior, LargeNLocalityOfSignificance) {
    const auto post =
        posterior_given_event(kFig1Prior, {1'000'000, 1.96}, SignificanceEvent::Significant);
    const double ratio = post.density(1.0) / kFig1Prior.density(1.0);
    EXPECT_GE(ratio, 0.999);
    EXPECT_LE(ratio, 1.001);
}

TEST(FullInformation, EqualPrecisionAverage) {
    for (double x : {-1.5, 0.0, 2.25}) {
        const auto post = full_information_posterior({0.0, 1.0}, 1, x);
        EXPECT_DOUBLE_EQ(post.mu_n, x / 2.0);
        EXPECT_DOUBLE_EQ(post.sigma_n, 1.0 / std::sqrt(2.0));
    }
    EXPECT_THROW(full_information_posterior({0.0, 1.0}, 0, 1.0), PreconditionError);
}

TEST(FullInformation, MatchesNormalizedProduct) {
    const auto post = full_information_posterior(kFig1Prior, 10, 0.5);
    EXPECT_NEAR(post.mu_n, 6.0 / 11.0, 1e-15);
    EXPECT_NEAR(post.sigma_n, 1.0 / std::sqrt(11.0), 1e-15);
    EXPECT_LT(post.sigma_n, kFig1Prior.sigma);

    // Prior x N(theta, 1/10) likelihood of theta_hat = 0.5, normalized numerically.
    auto product = [](double t) {
        return std_normal_pdf(t - 1.0) * std_normal_pdf((0.5 - t) * std::sqrt(10.0));
    };
    const double z = fine_trapezoid(product, -8.0, 8.0, 200000);
    const double mean = fine_trapezoid([&](double t) { return t * product(t); }, -8.0, 8.0, 200000) / z;
    const double second = fine_trapezoid([&](double t) { return t * t * product(t); }, -8.0, 8.0, 200000) / z;
    EXPECT_NEAR(post.mu_n, mean, 1e-9);
    EXPECT_NEAR(post.sigma_n, std::sqrt(second - mean * mean), 1e-9);
    for (double t : {0.0, 0.5, 1.2}) EXPECT_NEAR(post.density(t), product(t) / z, 1e-8);
}

TEST(SignRatioLimits, Significant) {
    // mpmath reference 1/Phi(1) = 1.18857341734506...
    EXPECT_NEAR(sign_ratio_limit_significant(kFig1Prior, 1.96, 2.0).value(), 1.1885734173450602, 1e-13);
    EXPECT_EQ(sign_ratio_limit_significant(kFig1Prior, 1.96, -1.0).value(), 0.0);
    EXPECT_EQ(sign_ratio_limit_significant({-3.0, 2.0}, 1.96, -0.01).value(), 0.0);
    EXPECT_DOUBLE_EQ(sign_ratio_limit_significant({0.0, 1.0}, 1.96, 0.5).value(), 2.0);
    EXPECT_NEAR(sign_ratio_limit_significant(kFig1Prior, 1.96, 0.0).value(),
                std_normal_cdf(-1.96) / std_normal_cdf(1.0), 1e-15);
    EXPECT_THROW(sign_ratio_limit_significant(kFig1Prior, 0.0, 1.0), PreconditionError);
}

TEST(SignRatioLimits, NonNegativeMeanNeverMoreThanDoubles) {
    for (double mu = 0.0; mu < 3.0; mu += 0.1) {
        EXPECT_LE(sign_ratio_limit_significant({mu, 1.0}, 1.96, 1.0).value(), 2.0);
    }
}

TEST(SignRatioLimits, FiniteNConvergence) {
    const PointNullDesign design{1'000'000, 1.96};
    const auto post = posterior_given_event(kFig1Prior, design, SignificanceEvent::SignificantPositive);
    for (double theta : {-1.0, 2.0}) {
        const double finite = post.density(theta) / kFig1Prior.density(theta);
        EXPECT_NEAR(finite, sign_ratio_limit_significant(kFig1Prior, 1.96, theta).value(), 1e-3);
    }
}

TEST(SignRatioLimits, NonSignificant) {
    EXPECT_EQ(sign_ratio_limit_nonsignificant(1.0).value(), 0.0);
    EXPECT_EQ(sign_ratio_limit_nonsignificant(-3.0).value(), 0.0);
    const auto at_zero = sign_ratio_limit_nonsignificant(0.0);
    EXPECT_TRUE(at_zero.is_infinite());
    EXPECT_EQ(at_zero, ExtendedReal::positive_infinity());
    EXPECT_THROW(at_zero.value(), DomainError);
    EXPECT_EQ(at_zero.as_double(), kPosInf);

    // Finite-n: the density ratio at 0 grows while the ratio away from 0 vanishes.
    double prev = 0.0;
    for (std::int64_t n : {100, 10'000, 1'000'000}) {
        const auto post = posterior_given_event(kFig1Prior, {n, 1.96},
                                                SignificanceEvent::NonSignificantPositive);
        const double at0 = post.density(0.0) / kFig1Prior.density(0.0);
        EXPECT_GT(at0, prev);
        prev = at0;
        if (n >= 10'000) {
            EXPECT_LT(post.density(1.0) / kFig1Prior.density(1.0), 1e-10);
        }
    }
}
