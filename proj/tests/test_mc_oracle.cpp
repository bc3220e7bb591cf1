#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "nonsig/mc_oracle.hpp"

using namespace nonsig;

namespace {

const NormalPrior kFig1Prior{1.0, 1.0};
const PointNullDesign kFig1Design{10, 1.96};

SimulationPlan plan_with(std::int64_t draws, std::uint64_t seed = 42) {
    SimulationPlan plan;
    plan.draws = draws;
    plan.seed = seed;
    return plan;
}

void expect_same(const SimulationResult& a, const SimulationResult& b) {
    ASSERT_EQ(a.draws, b.draws);
    ASSERT_EQ(a.tallies.size(), b.tallies.size());
    for (std::size_t i = 0; i < a.tallies.size(); ++i) {
        EXPECT_EQ(a.tallies[i].hits, b.tallies[i].hits);
        EXPECT_EQ(a.tallies[i].atom_hits, b.tallies[i].atom_hits);
        EXPECT_EQ(a.tallies[i].in_range, b.tallies[i].in_range);
        EXPECT_EQ(a.tallies[i].bin_counts, b.tallies[i].bin_counts);
    }
}

}  // namespace

TEST(CounterRngTest, OpenUnitIntervalAndMean) {
    const CounterRng rng(7);
    double sum = 0.0;
    const int draws = 200'000;
    for (int i = 0; i < draws; ++i) {
        const double u = rng.uniform(i, i % 4);
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / draws, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / draws));
    EXPECT_NE(CounterRng(1).uniform(0, 0), CounterRng(2).uniform(0, 0));
    EXPECT_EQ(CounterRng(1).uniform(5, 2), CounterRng(1).uniform(5, 2));
}

TEST(SimulationPlanTest, Validation) {
    EXPECT_THROW(plan_with(0).validate(), PreconditionError);
    SimulationPlan plan;
    plan.bins = 10;
    EXPECT_THROW(plan.validate(), PreconditionError);
    plan = {};
    plan.range = {1.0, 1.0};
    EXPECT_THROW(plan.validate(), PreconditionError);
    EXPECT_TRUE(plan_with(1000).is_weak());
    EXPECT_FALSE(plan_with(10'000).is_weak());
}

TEST(Simulation, DeterministicAndShardInvariant) {
    const auto prior = MixedPrior::normal(0.3, 1.0, 1.0);
    auto plan = plan_with(100'001);
    const auto a = simulate_events(prior, kFig1Design, kSignPartition, plan);
    const auto b = simulate_events(prior, kFig1Design, kSignPartition, plan);
    expect_same(a, b);
    plan.shards = 3;
    expect_same(a, simulate_events(prior, kFig1Design, kSignPartition, plan));
}

TEST(Simulation, SplitSampleConsistency) {
    const auto prior = MixedPrior::from(kFig1Prior);
    const std::int64_t total = 400'000;
    auto first = plan_with(total / 2);
    auto second = plan_with(total / 2);
    second.first_draw = total / 2;
    const auto whole = estimate_event_probability(prior, kFig1Design, SignificanceEvent::Significant,
                                                  plan_with(total));
    const auto a = estimate_event_probability(prior, kFig1Design, SignificanceEvent::Significant, first);
    const auto b = estimate_event_probability(prior, kFig1Design, SignificanceEvent::Significant, second);
    EXPECT_LT(std::abs(a.value - b.value), 6.0 * std::hypot(a.std_error, b.std_error));
    // Counts merge exactly.
    EXPECT_DOUBLE_EQ(whole.value, 0.5 * (a.value + b.value));
}

TEST(Simulation, SignPartitionSumsToOne) {
    const auto prior = MixedPrior::normal(0.4, 0.5, 1.0);
    const auto result = simulate_events(prior, kFig1Design, kSignPartition, plan_with(50'000));
    std::int64_t hits = 0;
    for (const auto& t : result.tallies) hits += t.hits;
    EXPECT_EQ(hits, result.draws);
    const auto two_way = simulate_events(prior, kFig1Design, kTwoWayPartition, plan_with(50'000));
    EXPECT_EQ(two_way.tallies[0].hits + two_way.tallies[1].hits, two_way.draws);
}

TEST(Simulation, CertainEvent) {
    const auto est = estimate_event_probability(MixedPrior::from(kFig1Prior), {10, 0.0},
                                                SignificanceEvent::Significant, plan_with(20'000));
    EXPECT_EQ(est.value, 1.0);
    EXPECT_EQ(est.std_error, 0.0);
    EXPECT_FALSE(est.degenerate);
    const auto none = estimate_event_probability(MixedPrior::from(kFig1Prior), {10, 0.0},
                                                 SignificanceEvent::NonSignificant, plan_with(20'000));
    EXPECT_EQ(none.value, 0.0);
    EXPECT_TRUE(none.degenerate);
}

TEST(Simulation, HeadlineProbability) {
    const auto est = estimate_event_probability(MixedPrior::from(kFig1Prior), kFig1Design,
                                                SignificanceEvent::Significant, plan_with(1'000'000));
    EXPECT_NEAR(est.std_error, 4.6e-4, 2e-5);
    EXPECT_NEAR(est.value, 0.7028, 4.0 * est.std_error);
    EXPECT_NEAR(est.value, marginal_rejection_probability(kFig1Prior, kFig1Design), 4.0 * est.std_error);
}

TEST(Simulation, AtomLimitProbability) {
    const auto est = estimate_event_probability(MixedPrior::normal(0.5, 0.0, 1.0), {1'000'000, 1.96},
                                                SignificanceEvent::Significant, plan_with(1'000'000));
    EXPECT_NEAR(est.value, 0.525, 4.0 * est.std_error);
}

TEST(Simulation, AtomFractionTracksMassAtZero) {
    const auto prior = MixedPrior::normal(0.5, 0.0, 1.0);
    SimulationPlan plan = plan_with(1'000'000);
    plan.range = {-4.0, 4.0};
    const auto hist = estimate_conditional_histogram(prior, {10'000, 1.96},
                                                     SignificanceEvent::NonSignificant, plan);
    const double analytic =
        posterior_given_nonsignificance(prior, normal_power_curve(1.96), 10'000).mass_at_zero();
    const double f = hist.atom_fraction();
    const double se = std::sqrt(analytic * (1.0 - analytic) / hist.conditioning_draws);
    EXPECT_NEAR(f, analytic, 4.0 * se);
    EXPECT_EQ(hist.atom_draws + hist.in_range_draws, hist.conditioning_draws);
    EXPECT_EQ(std::accumulate(hist.counts.begin(), hist.counts.end(), std::int64_t{0}),
              hist.in_range_draws);
}

TEST(Histogram, MassesSumToOne) {
    const auto hist = estimate_conditional_histogram(MixedPrior::from(kFig1Prior), kFig1Design,
                                                     SignificanceEvent::NonSignificant,
                                                     plan_with(100'000));
    EXPECT_EQ(hist.bin_edges.size(), hist.masses.size() + 1);
    EXPECT_NEAR(std::accumulate(hist.masses.begin(), hist.masses.end(), 0.0), 1.0, 1e-12);
    for (std::size_t b = 1; b < hist.bin_edges.size(); ++b) {
        EXPECT_LT(hist.bin_edges[b - 1], hist.bin_edges[b]);
    }
}

TEST(Histogram, MatchesAnalyticPosterior) {
    const auto post = posterior_given_event(kFig1Prior, kFig1Design, SignificanceEvent::NonSignificant);
    const auto hist = estimate_conditional_histogram(MixedPrior::from(kFig1Prior), kFig1Design,
                                                     SignificanceEvent::NonSignificant,
                                                     plan_with(1'000'000));
    const auto points = post.breakpoints();
    EXPECT_LT(compare_histogram_to_density(hist, [&](double t) { return post.density(t); }, points), 4.0);
    // The prior is clearly rejected.
    EXPECT_GT(compare_histogram_to_density(hist, [&](double t) { return kFig1Prior.density(t); }), 10.0);
}

TEST(Histogram, SymmetricUnderZeroMeanPrior) {
    SimulationPlan plan = plan_with(1'000'000);
    plan.range = {-4.0, 4.0};
    const auto hist = estimate_conditional_histogram(MixedPrior::normal(0.0, 0.0, 1.0), kFig1Design,
                                                     SignificanceEvent::Significant, plan);
    std::int64_t left = 0;
    std::int64_t right = 0;
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        (b < hist.counts.size() / 2 ? left : right) += hist.counts[b];
    }
    const double m = static_cast<double>(hist.in_range_draws);
    const double diff = static_cast<double>(left - right) / m;
    // Var(L - R) / m^2 = 1 / m when each side has probability 1/2.
    EXPECT_LT(std::abs(diff), 4.0 / std::sqrt(m));
}

TEST(Histogram, IdenticalMassesGiveZero) {
    const auto post = posterior_given_event(kFig1Prior, kFig1Design, SignificanceEvent::Significant);
    const auto density = [&](double t) { return post.density(t); };
    ConditionalHistogram hist;
    const int bins = 20;
    for (int b = 0; b <= bins; ++b) hist.bin_edges.push_back(-3.0 + 8.0 * b / bins);
    double total = 0.0;
    for (int b = 0; b < bins; ++b) {
        hist.masses.push_back(integrate(density, {hist.bin_edges[b], hist.bin_edges[b + 1]}));
        total += hist.masses.back();
    }
    for (auto& m : hist.masses) m /= total;
    hist.in_range_draws = 1'000'000;
    hist.conditioning_draws = 1'000'000;
    EXPECT_EQ(compare_histogram_to_density(hist, density), 0.0);
}

TEST(Histogram, InsufficientConditioning) {
    try {
        estimate_conditional_histogram(MixedPrior::from(kFig1Prior), {10, 12.0},
                                       SignificanceEvent::Significant, plan_with(10'000));
        FAIL() << "expected InsufficientConditioningError";
    } catch (const InsufficientConditioningError& e) {
        EXPECT_LT(e.retained(), 100);
    }
}

TEST(Histogram, SeedIndependenceOfConclusions) {
    const auto prior = MixedPrior::from(kFig1Prior);
    for (auto event : kSignPartition) {
        const auto post = posterior_given_event(kFig1Prior, kFig1Design, event);
        const auto points = post.breakpoints();
        int exceed = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto hist = estimate_conditional_histogram(prior, kFig1Design, event,
                                                             plan_with(100'000, seed));
            exceed += compare_histogram_to_density(hist, [&](double t) { return post.density(t); },
                                                   points) > 4.0;
        }
        EXPECT_LE(exceed, 1) << to_string(event);
    }
}
