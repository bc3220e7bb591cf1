#pragma once
// Brute-force simulation of the full generative process: theta from the
// prior, theta_hat given theta, then the test outcome. Used as an independent
// oracle for every closed form and quadrature in the library.
//
// Random numbers come from a counter-based generator: the k-th uniform of
// draw i is SplitMix64's output function applied to
//   splitmix64(seed) + (4 i + k + 1) * 0x9E3779B97F4A7C15,
// mapped to ((v >> 11) + 0.5) / 2^53. Any draw range can therefore be
// simulated independently, and shards reproduce a serial run bit for bit.
// Normal variates use std_normal_quantile on these uniforms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "nonsig/errors.hpp"
#include "nonsig/general_model.hpp"
#include "nonsig/normal_model.hpp"
#include "nonsig/numerics.hpp"

namespace nonsig {

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

    /// Uniform in the open interval (0, 1); `stream` selects one of four per draw.
    double uniform(std::uint64_t draw, unsigned stream) const {
        const std::uint64_t counter = 4 * draw + stream + 1;
        const std::uint64_t v = mix(key_ + counter * kGolden);
        return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    std::uint64_t key_;
};

struct SimulationPlan {
    std::int64_t draws = 1'000'000;
    std::uint64_t seed = 42;
    int bins = 40;
    Interval range{-3.0, 5.0};
    std::int64_t first_draw = 0;  // offset into the counter sequence
    int shards = 1;

    static constexpr std::int64_t kRecommendedDraws = 10'000;

    void validate() const {
        if (draws < 1) throw PreconditionError("SimulationPlan: draws must be positive");
        if (bins < 20) throw PreconditionError("SimulationPlan: bins must be >= 20");
        if (!(range.lo < range.hi) || !std::isfinite(range.lo) || !std::isfinite(range.hi)) {
            throw PreconditionError("SimulationPlan: range must have positive finite width");
        }
        if (first_draw < 0) throw PreconditionError("SimulationPlan: first_draw must be >= 0");
        if (shards < 1) throw PreconditionError("SimulationPlan: shards must be >= 1");
    }

    /// Fewer draws than recommended; standard-error thresholds are weak.
    bool is_weak() const noexcept { return draws < kRecommendedDraws; }
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t draws_used = 0;
    bool degenerate = false;  // no draw landed in the event
};

/// Histogram of retained continuous theta draws inside `range`; atoms at
/// theta = 0 are counted separately and never binned.
struct ConditionalHistogram {
    std::vector<double> bin_edges;
    std::vector<double> masses;
    std::vector<std::int64_t> counts;
    std::int64_t conditioning_draws = 0;
    std::int64_t atom_draws = 0;
    std::int64_t in_range_draws = 0;

    double atom_fraction() const {
        return conditioning_draws > 0
                   ? static_cast<double>(atom_draws) / static_cast<double>(conditioning_draws)
                   : 0.0;
    }
};

/// Event counts and histograms for several events from one simulated stream.
struct EventTally {
    SignificanceEvent event{};
    std::int64_t hits = 0;
    std::int64_t atom_hits = 0;
    std::int64_t in_range = 0;
    std::vector<std::int64_t> bin_counts;
};

struct SimulationResult {
    std::int64_t draws = 0;
    std::vector<EventTally> tallies;

    const EventTally& tally(SignificanceEvent event) const {
        for (const auto& t : tallies) {
            if (t.event == event) return t;
        }
        throw PreconditionError("SimulationResult: event was not simulated");
    }
};

namespace detail {

inline void simulate_range(const MixedPrior& prior, const PointNullDesign& design,
                           std::span<const SignificanceEvent> events, const SimulationPlan& plan,
                           std::int64_t begin, std::int64_t end, std::vector<EventTally>& out) {
    const CounterRng rng(plan.seed);
    const double root_n = design.sqrt_n();
    const double bin_width = plan.range.width() / plan.bins;
    for (std::int64_t i = begin; i < end; ++i) {
        const auto draw = static_cast<std::uint64_t>(i);
        const bool atom = prior.q() > 0.0 && rng.uniform(draw, 0) < prior.q();
        const double theta = atom ? 0.0 : prior.continuous_quantile(rng.uniform(draw, 1));
        const double t = root_n * theta + std_normal_quantile(rng.uniform(draw, 2));
        for (std::size_t e = 0; e < events.size(); ++e) {
            if (!EventRegion::contains(events[e], t, design.c)) continue;
            EventTally& tally = out[e];
            ++tally.hits;
            if (atom) {
                ++tally.atom_hits;
                continue;
            }
            if (theta < plan.range.lo || theta >= plan.range.hi) continue;
            auto bin = static_cast<int>((theta - plan.range.lo) / bin_width);
            bin = std::clamp(bin, 0, plan.bins - 1);
            ++tally.bin_counts[static_cast<std::size_t>(bin)];
            ++tally.in_range;
        }
    }
}

}  // namespace detail

/// Simulates plan.draws replications and tallies each requested event.
/// Sharded over plan.shards threads; the result does not depend on the shard count.
inline SimulationResult simulate_events(const MixedPrior& prior, const PointNullDesign& design,
                                        std::span<const SignificanceEvent> events,
                                        const SimulationPlan& plan) {
    plan.validate();
    design.validate();
    if (!prior.can_sample()) {
        throw PreconditionError("simulate_events: prior has no quantile function");
    }

    auto empty_tallies = [&] {
        std::vector<EventTally> tallies;
        for (auto e : events) {
            tallies.push_back({e, 0, 0, 0, std::vector<std::int64_t>(plan.bins, 0)});
        }
        return tallies;
    };

    const int shards = static_cast<int>(std::min<std::int64_t>(plan.shards, plan.draws));
    std::vector<std::vector<EventTally>> partial(shards, empty_tallies());
    std::vector<std::thread> workers;
    const std::int64_t begin = plan.first_draw;
    for (int s = 0; s < shards; ++s) {
        const std::int64_t lo = begin + plan.draws * s / shards;
        const std::int64_t hi = begin + plan.draws * (s + 1) / shards;
        if (shards == 1) {
            detail::simulate_range(prior, design, events, plan, lo, hi, partial[0]);
        } else {
            workers.emplace_back([&, s, lo, hi] {
                detail::simulate_range(prior, design, events, plan, lo, hi, partial[s]);
            });
        }
    }
    for (auto& w : workers) w.join();

    SimulationResult result{plan.draws, empty_tallies()};
    for (const auto& shard : partial) {
        for (std::size_t e = 0; e < shard.size(); ++e) {
            auto& acc = result.tallies[e];
            acc.hits += shard[e].hits;
            acc.atom_hits += shard[e].atom_hits;
            acc.in_range += shard[e].in_range;
            for (std::size_t b = 0; b < acc.bin_counts.size(); ++b) {
                acc.bin_counts[b] += shard[e].bin_counts[b];
            }
        }
    }
    return result;
}

/// Frequency estimate with binomial standard error.
inline McEstimate event_probability_from(const SimulationResult& result, SignificanceEvent event) {
    const auto& tally = result.tally(event);
    const double n = static_cast<double>(result.draws);
    const double p = static_cast<double>(tally.hits) / n;
    return {p, std::sqrt(p * (1.0 - p) / n), result.draws, tally.hits == 0};
}

inline ConditionalHistogram histogram_from(const SimulationResult& result,
                                           SignificanceEvent event, const SimulationPlan& plan) {
    constexpr std::int64_t kMinRetained = 100;
    const auto& tally = result.tally(event);
    if (tally.hits < kMinRetained || tally.in_range == 0) {
        throw InsufficientConditioningError(
            "estimate_conditional_histogram: only " + std::to_string(tally.hits) +
                " draws retained for '" + std::string(to_string(event)) + "'",
            tally.hits);
    }
    ConditionalHistogram hist;
    hist.bin_edges.resize(static_cast<std::size_t>(plan.bins) + 1);
    for (int b = 0; b <= plan.bins; ++b) {
        hist.bin_edges[b] = b == plan.bins
                                ? plan.range.hi
                                : plan.range.lo + plan.range.width() * b / plan.bins;
    }
    hist.counts = tally.bin_counts;
    hist.conditioning_draws = tally.hits;
    hist.atom_draws = tally.atom_hits;
    hist.in_range_draws = tally.in_range;
    hist.masses.resize(hist.counts.size());
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        hist.masses[b] =
            static_cast<double>(hist.counts[b]) / static_cast<double>(tally.in_range);
    }
    return hist;
}

inline McEstimate estimate_event_probability(const MixedPrior& prior,
                                             const PointNullDesign& design,
                                             SignificanceEvent event, const SimulationPlan& plan) {
    const SignificanceEvent events[] = {event};
    return event_probability_from(simulate_events(prior, design, events, plan), event);
}

inline ConditionalHistogram estimate_conditional_histogram(const MixedPrior& prior,
                                                           const PointNullDesign& design,
                                                           SignificanceEvent event,
                                                           const SimulationPlan& plan) {
    const SignificanceEvent events[] = {event};
    return histogram_from(simulate_events(prior, design, events, plan), event, plan);
}

/// Largest |empirical - analytic| / SE over histogram bins.
///
/// Analytic bin masses are quadratures of `density` renormalized over the
/// histogram range, so the density only needs to be known up to a constant
/// there (a continuous part with the atom removed works as is). SE is the
/// multinomial standard error under the analytic masses. Bins expecting
/// fewer than 5 draws are skipped.
template <class Density>
double compare_histogram_to_density(const ConditionalHistogram& hist, Density&& density,
                                    std::span<const double> breakpoints = {},
                                    const QuadratureSpec& spec = {}) {
    const std::size_t bins = hist.masses.size();
    std::vector<double> expected(bins);
    double total = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        expected[b] = integrate(density, Interval{hist.bin_edges[b], hist.bin_edges[b + 1]}, spec,
                                breakpoints);
        total += expected[b];
    }
    if (!(total > 0.0)) throw DomainError("compare_histogram_to_density: zero analytic mass");

    const double draws = static_cast<double>(hist.in_range_draws);
    double worst = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double m = expected[b] / total;
        if (m * draws < 5.0) continue;
        const double se = std::sqrt(m * (1.0 - m) / draws);
        worst = std::max(worst, std::abs(hist.masses[b] - m) / se);
    }
    return worst;
}

}  // namespace nonsig
