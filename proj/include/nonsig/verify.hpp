#pragma once
// The analytic-vs-simulation suite behind `nonsig verify`.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "nonsig/general_model.hpp"
#include "nonsig/interval_null.hpp"
#include "nonsig/mc_oracle.hpp"
#include "nonsig/normal_model.hpp"

namespace nonsig {

struct VerifyOptions {
    std::int64_t draws = 1'000'000;
    std::uint64_t seed = 42;
    double z_threshold = 4.0;
    int shards = 1;

    void validate() const {
        if (draws < 1) throw PreconditionError("verify: draws must be positive");
        if (!(z_threshold > 0.0) || !std::isfinite(z_threshold)) {
            throw PreconditionError("verify: z threshold must be positive");
        }
        if (shards < 1) throw PreconditionError("verify: shards must be >= 1");
    }
};

struct CheckResult {
    std::string name;
    double statistic = 0.0;  // z score or z-score sup; NaN when the check could not run
    bool passed = false;
    std::string note;
};

struct VerifyReport {
    VerifyOptions options;
    std::vector<std::string> warnings;
    std::vector<CheckResult> checks;

    bool all_passed() const {
        for (const auto& c : checks) {
            if (!c.passed) return false;
        }
        return !checks.empty();
    }
};

namespace detail {

class ReportBuilder {
public:
    explicit ReportBuilder(VerifyReport& report) : report_(report) {}

    void statistic(std::string name, double z, std::string note = {}) {
        report_.checks.push_back(
            {std::move(name), z, std::isfinite(z) && z < report_.options.z_threshold,
             std::move(note)});
    }

    void exact(std::string name, bool ok, std::string note = {}) {
        report_.checks.push_back({std::move(name), ok ? 0.0 : NAN, ok, std::move(note)});
    }

    // Binomial z score of a simulated proportion against its analytic value.
    void proportion(std::string name, std::int64_t hits, std::int64_t trials, double expected) {
        if (trials == 0) {
            exact(std::move(name), false, "no trials");
            return;
        }
        const double n = static_cast<double>(trials);
        const double p_hat = static_cast<double>(hits) / n;
        const double se = std::sqrt(expected * (1.0 - expected) / n);
        const double z = se > 0.0 ? std::abs(p_hat - expected) / se
                                  : (p_hat == expected ? 0.0 : INFINITY);
        char note[96];
        std::snprintf(note, sizeof note, "estimate=%.6f analytic=%.6f", p_hat, expected);
        statistic(std::move(name), z, note);
    }

    template <class Density>
    void histogram(std::string name, const SimulationResult& sim, SignificanceEvent event,
                   const SimulationPlan& plan, Density&& density,
                   const std::vector<double>& breakpoints) {
        try {
            const auto hist = histogram_from(sim, event, plan);
            const double z = compare_histogram_to_density(hist, density, breakpoints);
            statistic(std::move(name), z, "retained=" + std::to_string(hist.conditioning_draws));
        } catch (const InsufficientConditioningError& e) {
            exact(std::move(name), false, e.what());
        }
    }

private:
    VerifyReport& report_;
};

inline SimulationPlan verify_plan(const VerifyOptions& opt, Interval range) {
    SimulationPlan plan;
    plan.draws = opt.draws;
    plan.seed = opt.seed;
    plan.bins = 40;
    plan.range = range;
    plan.shards = opt.shards;
    return plan;
}

inline constexpr SignificanceEvent kAllEvents[] = {
    SignificanceEvent::Significant,           SignificanceEvent::NonSignificant,
    SignificanceEvent::SignificantPositive,   SignificanceEvent::NonSignificantPositive,
    SignificanceEvent::SignificantNegative,   SignificanceEvent::NonSignificantNegative};

}  // namespace detail

/// Runs every analytic-vs-oracle comparison. Deterministic given the options.
inline VerifyReport run_verification(const VerifyOptions& opt) {
    opt.validate();
    VerifyReport report{opt, {}, {}};
    if (opt.draws < SimulationPlan::kRecommendedDraws) {
        report.warnings.push_back("draws=" + std::to_string(opt.draws) + " is below " +
                                  std::to_string(SimulationPlan::kRecommendedDraws) +
                                  "; standard-error thresholds are weak");
    }
    detail::ReportBuilder out(report);

    // Normal prior N(1, 1), n = 10, c = 1.96: all six events.
    {
        const NormalPrior prior{1.0, 1.0};
        const PointNullDesign design{10, 1.96};
        const auto plan = detail::verify_plan(opt, {-3.0, 5.0});
        const auto sim =
            simulate_events(MixedPrior::from(prior), design, detail::kAllEvents, plan);
        for (auto event : detail::kAllEvents) {
            const std::string base = "normal." + std::string(to_string(event));
            const auto post = posterior_given_event(prior, design, event);
            out.proportion(base + ".probability", sim.tally(event).hits, sim.draws,
                           post.event_probability());
            out.histogram(base + ".histogram", sim, event, plan,
                          [&](double t) { return post.density(t); }, post.breakpoints());
        }
        std::int64_t sign_total = 0;
        for (auto event : kSignPartition) sign_total += sim.tally(event).hits;
        out.exact("normal.sign_partition_sums_to_one", sign_total == sim.draws);
    }

    // Atom q = 0.5 at zero plus N(0, 1), n = 10^4.
    {
        const auto prior = MixedPrior::normal(0.5, 0.0, 1.0);
        const PointNullDesign design{10000, 1.96};
        const auto curve = normal_power_curve(design.c);
        const auto plan = detail::verify_plan(opt, {-4.0, 4.0});
        const SignificanceEvent events[] = {SignificanceEvent::Significant,
                                            SignificanceEvent::NonSignificant};
        const auto sim = simulate_events(prior, design, events, plan);
        const auto sig = posterior_given_significance(prior, curve, design.n);
        const auto nonsig = posterior_given_nonsignificance(prior, curve, design.n);
        const auto& sig_tally = sim.tally(SignificanceEvent::Significant);
        const auto& nonsig_tally = sim.tally(SignificanceEvent::NonSignificant);
        out.proportion("mixed.significant.probability", sig_tally.hits, sim.draws,
                       sig.event_probability());
        out.proportion("mixed.significant.mass_at_zero", sig_tally.atom_hits, sig_tally.hits,
                       sig.mass_at_zero());
        out.proportion("mixed.nonsignificant.mass_at_zero", nonsig_tally.atom_hits,
                       nonsig_tally.hits, nonsig.mass_at_zero());
        out.histogram("mixed.significant.histogram", sim, SignificanceEvent::Significant, plan,
                      [&](double t) { return sig.continuous_density(t); }, sig.breakpoints());
    }

    // Interval null, delta = 1, n = 10^4, alpha = 0.05, prior N(1, 1).
    {
        const NormalPrior prior{1.0, 1.0};
        const auto design = make_interval_null_design(10000, 1.0, 0.05);
        const auto plan = detail::verify_plan(opt, {-3.0, 5.0});
        const SignificanceEvent events[] = {SignificanceEvent::Significant,
                                            SignificanceEvent::NonSignificant};
        const auto sim =
            simulate_events(MixedPrior::from(prior), design.as_point_design(), events, plan);
        for (bool significant : {true, false}) {
            const auto post = interval_posterior(prior, design, significant);
            const std::string base =
                std::string("interval.") + (significant ? "significant" : "nonsignificant");
            out.proportion(base + ".probability", sim.tally(post.event()).hits, sim.draws,
                           post.event_probability());
            out.histogram(base + ".histogram", sim, post.event(), plan,
                          [&](double t) { return post.density(t); }, post.breakpoints());
        }
    }
    return report;
}

/// Plain-text report: one line per check, then a summary and failure list.
inline std::string format_report(const VerifyReport& report) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "# verify draws=%lld seed=%llu z_threshold=%g\n",
                  static_cast<long long>(report.options.draws),
                  static_cast<unsigned long long>(report.options.seed),
                  report.options.z_threshold);
    os << line;
    for (const auto& w : report.warnings) os << "WARNING " << w << '\n';
    std::size_t passed = 0;
    for (const auto& c : report.checks) {
        std::snprintf(line, sizeof line, "%-4s %-44s z=%9.4f", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.statistic);
        os << line;
        if (!c.note.empty()) os << "  " << c.note;
        os << '\n';
        passed += c.passed ? 1 : 0;
    }
    os << "summary " << passed << '/' << report.checks.size() << " passed\n";
    os << "failed [";
    bool first = true;
    for (const auto& c : report.checks) {
        if (c.passed) continue;
        os << (first ? "" : ",") << c.name;
        first = false;
    }
    os << "]\n";
    return os.str();
}

}  // namespace nonsig
