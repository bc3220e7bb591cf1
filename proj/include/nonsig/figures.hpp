#pragma once
// Figure tables: each function evaluates the analytic model on a grid and
// returns a CurveTable whose metadata is enough to regenerate it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nonsig/curve_table.hpp"
#include "nonsig/general_model.hpp"
#include "nonsig/interval_null.hpp"
#include "nonsig/normal_model.hpp"

namespace nonsig {

inline constexpr const char* kToolVersion = "nonsig 0.1.0";

struct GridSpec {
    double lo = -4.0;
    double hi = 4.0;
    int points = 1001;

    void validate() const {
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
            throw PreconditionError("grid: need finite lo < hi");
        }
        if (points < 2) throw PreconditionError("grid: need at least 2 points");
    }

    std::vector<double> values() const {
        validate();
        std::vector<double> xs(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) {
            xs[i] = i + 1 == points ? hi : lo + (hi - lo) * i / (points - 1);
        }
        return xs;
    }

    static GridSpec around(const NormalPrior& prior, int points = 1001) {
        return {prior.mu - 4.0 * prior.sigma, prior.mu + 4.0 * prior.sigma, points};
    }
};

namespace detail {

inline void add_grid_meta(CurveTable& table, const GridSpec& grid) {
    table.add_meta("grid_lo", format_real(grid.lo));
    table.add_meta("grid_hi", format_real(grid.hi));
    table.add_meta("grid_points", std::to_string(grid.points));
}

inline void add_prior_meta(CurveTable& table, const NormalPrior& prior) {
    table.add_meta("mu", format_real(prior.mu));
    table.add_meta("sigma", format_real(prior.sigma));
}

inline CurveTable start_table(const char* command) {
    CurveTable table;
    table.add_meta("tool", kToolVersion);
    table.add_meta("command", command);
    return table;
}

inline std::string join_reals(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + format_real(xs[i]);
    return out;
}

inline std::string join_ints(const std::vector<std::int64_t>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + std::to_string(xs[i]);
    return out;
}

}  // namespace detail

/// Trapezoid rule over a tabulated column.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return acc;
}

struct Figure1Options {
    NormalPrior prior{1.0, 1.0};
    std::int64_t n = 10;
    double c = 1.96;
    std::optional<GridSpec> grid;
};

/// Prior and posteriors after significance / non-significance.
inline CurveTable figure1(const Figure1Options& opt = {}) {
    opt.prior.validate();
    const GridSpec grid = opt.grid.value_or(GridSpec::around(opt.prior));
    const PointNullDesign design{opt.n, opt.c};
    const auto sig = posterior_given_event(opt.prior, design, SignificanceEvent::Significant);
    const auto nonsig = posterior_given_event(opt.prior, design, SignificanceEvent::NonSignificant);

    CurveTable table = detail::start_table("figure1");
    detail::add_prior_meta(table, opt.prior);
    table.add_meta("n", std::to_string(opt.n));
    table.add_meta("c", format_real(opt.c));
    detail::add_grid_meta(table, grid);
    table.add_meta("pr_significant", format_real(sig.event_probability()));
    table.column_names = {"theta", "prior", "post_significant", "post_nonsignificant"};
    for (double t : grid.values()) {
        table.rows.push_back({t, opt.prior.density(t), sig.density(t), nonsig.density(t)});
    }
    return table;
}

struct Figure2Options {
    NormalPrior prior{1.0, 1.0};
    double c = 1.96;
    std::vector<std::int64_t> n_list{10, 100, 1000, 10000};
    std::optional<GridSpec> grid;
};

/// Posterior after significance for several sample sizes.
inline CurveTable figure2(const Figure2Options& opt = {}) {
    opt.prior.validate();
    if (opt.n_list.empty()) throw PreconditionError("figure2: n list is empty");
    const GridSpec grid = opt.grid.value_or(GridSpec::around(opt.prior));
    std::vector<ConditionalPosterior> posts;
    for (auto n : opt.n_list) {
        posts.push_back(
            posterior_given_event(opt.prior, PointNullDesign{n, opt.c}, SignificanceEvent::Significant));
    }

    CurveTable table = detail::start_table("figure2");
    detail::add_prior_meta(table, opt.prior);
    table.add_meta("c", format_real(opt.c));
    table.add_meta("n_list", detail::join_ints(opt.n_list));
    detail::add_grid_meta(table, grid);
    table.column_names = {"theta", "prior"};
    for (auto n : opt.n_list) table.column_names.push_back("post_significant_n" + std::to_string(n));
    for (double t : grid.values()) {
        std::vector<double> row{t, opt.prior.density(t)};
        for (const auto& p : posts) row.push_back(p.density(t));
        table.rows.push_back(std::move(row));
    }
    return table;
}

struct Figure3Options {
    std::vector<double> alpha_list{0.05, 0.005};
    int q_points = 1000;  // q = 0, 1/q_points, ..., 1 - 1/q_points
};

/// Limiting posterior-to-prior ratio after significance as a function of q.
inline CurveTable figure3(const Figure3Options& opt = {}) {
    if (opt.alpha_list.empty()) throw PreconditionError("figure3: alpha list is empty");
    for (double a : opt.alpha_list) {
        if (!(a > 0.0 && a < 1.0)) throw PreconditionError("figure3: alphas must lie in (0, 1)");
    }
    if (opt.q_points < 2) throw PreconditionError("figure3: need at least 2 q points");

    CurveTable table = detail::start_table("figure3");
    table.add_meta("alpha_list", detail::join_reals(opt.alpha_list));
    table.add_meta("q_points", std::to_string(opt.q_points));
    table.column_names = {"q"};
    for (double a : opt.alpha_list) table.column_names.push_back("ratio_alpha_" + format_real(a));
    for (int i = 0; i < opt.q_points; ++i) {
        const double q = static_cast<double>(i) / opt.q_points;
        std::vector<double> row{q};
        for (double a : opt.alpha_list) row.push_back(significance_ratio_limit(q, a));
        table.rows.push_back(std::move(row));
    }
    return table;
}

struct Figure4Options {
    NormalPrior prior{1.0, 1.0};
    double alpha = 0.05;
    std::int64_t n = 10000;
    std::vector<double> delta_list{0.5, 1.0, 2.0};
    std::optional<GridSpec> grid;

    /// [-4, 4] widened to cover prior mean +- 4 sd.
    GridSpec default_grid() const {
        return {std::min(-4.0, prior.mu - 4.0 * prior.sigma),
                std::max(4.0, prior.mu + 4.0 * prior.sigma), 1001};
    }
};

/// Posteriors after the interval-null test for several half-widths.
inline CurveTable figure4(const Figure4Options& opt = {}) {
    opt.prior.validate();
    if (opt.delta_list.empty()) throw PreconditionError("figure4: delta list is empty");
    const GridSpec grid = opt.grid.value_or(opt.default_grid());

    CurveTable table = detail::start_table("figure4");
    detail::add_prior_meta(table, opt.prior);
    table.add_meta("alpha", format_real(opt.alpha));
    table.add_meta("n", std::to_string(opt.n));
    table.add_meta("delta_list", detail::join_reals(opt.delta_list));
    detail::add_grid_meta(table, grid);
    table.column_names = {"theta", "prior"};

    std::vector<ConditionalPosterior> posts;
    for (double delta : opt.delta_list) {
        if (!(delta > 0.0)) throw PreconditionError("figure4: deltas must be positive");
        const auto design = make_interval_null_design(opt.n, delta, opt.alpha);
        table.add_meta("c_delta_" + format_real(delta), format_real(design.c));
        posts.push_back(interval_posterior(opt.prior, design, true));
        posts.push_back(interval_posterior(opt.prior, design, false));
        table.column_names.push_back("significant_delta_" + format_real(delta));
        table.column_names.push_back("nonsignificant_delta_" + format_real(delta));
    }
    for (double t : grid.values()) {
        std::vector<double> row{t, opt.prior.density(t)};
        for (const auto& p : posts) row.push_back(p.density(t));
        table.rows.push_back(std::move(row));
    }
    return table;
}

using Figure5Options = Figure1Options;

/// Posteriors conditional on significance and a positive estimate.
inline CurveTable figure5(const Figure5Options& opt = {}) {
    opt.prior.validate();
    const GridSpec grid = opt.grid.value_or(GridSpec::around(opt.prior));
    const PointNullDesign design{opt.n, opt.c};
    const auto sig = posterior_given_event(opt.prior, design, SignificanceEvent::SignificantPositive);
    const auto nonsig =
        posterior_given_event(opt.prior, design, SignificanceEvent::NonSignificantPositive);

    CurveTable table = detail::start_table("figure5");
    detail::add_prior_meta(table, opt.prior);
    table.add_meta("n", std::to_string(opt.n));
    table.add_meta("c", format_real(opt.c));
    detail::add_grid_meta(table, grid);
    table.add_meta("pr_significant_positive", format_real(sig.event_probability()));
    table.add_meta("pr_nonsignificant_positive", format_real(nonsig.event_probability()));
    table.column_names = {"theta", "prior", "post_sig_positive", "post_nonsig_positive"};
    for (double t : grid.values()) {
        table.rows.push_back({t, opt.prior.density(t), sig.density(t), nonsig.density(t)});
    }
    return table;
}

struct PosteriorOptions {
    NormalPrior prior{1.0, 1.0};
    std::int64_t n = 10;
    std::optional<double> c;      // point null critical value
    std::optional<double> alpha;  // or size, from which c derives
    std::optional<double> delta;  // interval null half-width
    SignificanceEvent event = SignificanceEvent::Significant;
    std::optional<GridSpec> grid;
};

/// Any single conditional posterior on a grid.
inline CurveTable posterior_table(const PosteriorOptions& opt) {
    opt.prior.validate();
    double c = 0.0;
    if (opt.delta) {
        if (opt.c) throw PreconditionError("posterior: --c and --delta are exclusive");
        if (opt.event != SignificanceEvent::Significant &&
            opt.event != SignificanceEvent::NonSignificant) {
            throw PreconditionError("posterior: interval nulls support only the two-way events");
        }
        c = solve_critical_value(opt.n, *opt.delta, opt.alpha.value_or(0.05));
    } else if (opt.c) {
        if (opt.alpha) throw PreconditionError("posterior: give either --c or --alpha");
        c = *opt.c;
    } else {
        c = std_normal_quantile(1.0 - 0.5 * opt.alpha.value_or(0.05));
    }
    const PointNullDesign design{opt.n, c};
    design.validate();
    const auto post = posterior_given_event(opt.prior, design, opt.event);
    const GridSpec grid = opt.grid.value_or(GridSpec::around(opt.prior));

    CurveTable table = detail::start_table("posterior");
    detail::add_prior_meta(table, opt.prior);
    table.add_meta("n", std::to_string(opt.n));
    table.add_meta("null", opt.delta ? "interval" : "point");
    if (opt.delta) table.add_meta("delta", format_real(*opt.delta));
    if (opt.alpha) table.add_meta("alpha", format_real(*opt.alpha));
    table.add_meta("c", format_real(c));
    table.add_meta("event", std::string(to_string(opt.event)));
    detail::add_grid_meta(table, grid);
    table.add_meta("event_probability", format_real(post.event_probability()));
    table.column_names = {"theta", "prior", "posterior"};
    for (double t : grid.values()) table.rows.push_back({t, opt.prior.density(t), post.density(t)});
    return table;
}

}  // namespace nonsig
