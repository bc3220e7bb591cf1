// nonsig: figure tables, single posteriors, and the simulation check suite.
//
// Exit codes: 0 success, 1 check failure or numerical failure, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nonsig/nonsig.hpp"

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

struct GridFlags {
    std::optional<double> lo;
    std::optional<double> hi;
    std::optional<int> points;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--grid-lo", lo, "Lowest grid point");
        cmd->add_option("--grid-hi", hi, "Highest grid point");
        cmd->add_option("--grid-points", points, "Number of grid points");
    }

    std::optional<nonsig::GridSpec> resolve(const nonsig::GridSpec& fallback) const {
        if (!lo && !hi && !points) return std::nullopt;
        nonsig::GridSpec g{lo.value_or(fallback.lo), hi.value_or(fallback.hi),
                           points.value_or(fallback.points)};
        g.validate();
        return g;
    }
};

struct OutputFlags {
    std::string out;
    std::string svg;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--out", out, "CSV output path (default: standard output)");
        cmd->add_option("--svg", svg, "Also write an SVG line plot to this path");
    }

    void emit(const nonsig::CurveTable& table) const {
        if (out.empty() || out == "-") {
            nonsig::write_csv(table, std::cout);
        } else {
            std::ofstream os(out, std::ios::binary);
            if (!os) throw std::runtime_error("cannot open " + out);
            nonsig::write_csv(table, os);
        }
        if (!svg.empty()) {
            std::ofstream os(svg, std::ios::binary);
            if (!os) throw std::runtime_error("cannot open " + svg);
            nonsig::write_svg(table, os);
        }
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Posteriors conditional on the outcome of significance tests"};
    app.require_subcommand(1);
    app.set_version_flag("--version", nonsig::kToolVersion);

    // figure1 / figure5 share their flags.
    nonsig::Figure1Options f1;
    GridFlags f1_grid;
    OutputFlags f1_out;
    auto* fig1 = app.add_subcommand("figure1", "Prior and posteriors after a significance test");
    auto* fig5 = app.add_subcommand("figure5", "Posteriors given significance and a positive sign");
    for (auto* cmd : {fig1, fig5}) {
        cmd->add_option("--mu", f1.prior.mu, "Prior mean")->capture_default_str();
        cmd->add_option("--sigma", f1.prior.sigma, "Prior sd")->capture_default_str();
        cmd->add_option("--n", f1.n, "Sample size")->capture_default_str();
        cmd->add_option("--c", f1.c, "Critical value")->capture_default_str();
        f1_grid.add_to(cmd);
        f1_out.add_to(cmd);
    }

    nonsig::Figure2Options f2;
    GridFlags f2_grid;
    OutputFlags f2_out;
    auto* fig2 = app.add_subcommand("figure2", "Posterior after significance for several n");
    fig2->add_option("--mu", f2.prior.mu, "Prior mean")->capture_default_str();
    fig2->add_option("--sigma", f2.prior.sigma, "Prior sd")->capture_default_str();
    fig2->add_option("--c", f2.c, "Critical value")->capture_default_str();
    fig2->add_option("--n-list", f2.n_list, "Sample sizes")->delimiter(',')->capture_default_str();
    f2_grid.add_to(fig2);
    f2_out.add_to(fig2);

    nonsig::Figure3Options f3;
    OutputFlags f3_out;
    auto* fig3 = app.add_subcommand("figure3", "Limiting posterior/prior ratio against q");
    fig3->add_option("--alpha-list", f3.alpha_list, "Test sizes")->delimiter(',')->capture_default_str();
    fig3->add_option("--q-points", f3.q_points, "Number of q grid points")->capture_default_str();
    f3_out.add_to(fig3);

    nonsig::Figure4Options f4;
    GridFlags f4_grid;
    OutputFlags f4_out;
    auto* fig4 = app.add_subcommand("figure4", "Posteriors after an interval-null test");
    fig4->add_option("--mu", f4.prior.mu, "Prior mean")->capture_default_str();
    fig4->add_option("--sigma", f4.prior.sigma, "Prior sd")->capture_default_str();
    fig4->add_option("--alpha", f4.alpha, "Test size")->capture_default_str();
    fig4->add_option("--n", f4.n, "Sample size")->capture_default_str();
    fig4->add_option("--delta-list", f4.delta_list, "Null half-widths")->delimiter(',')->capture_default_str();
    f4_grid.add_to(fig4);
    f4_out.add_to(fig4);

    nonsig::PosteriorOptions po;
    std::string event_name = "significant";
    GridFlags po_grid;
    OutputFlags po_out;
    auto* post = app.add_subcommand("posterior", "One conditional posterior on a grid");
    post->add_option("--mu", po.prior.mu, "Prior mean")->capture_default_str();
    post->add_option("--sigma", po.prior.sigma, "Prior sd")->capture_default_str();
    post->add_option("--n", po.n, "Sample size")->capture_default_str();
    auto* c_opt = post->add_option("--c", po.c, "Critical value");
    post->add_option("--alpha", po.alpha, "Test size (default 0.05)");
    post->add_option("--delta", po.delta, "Interval-null half-width")->excludes(c_opt);
    post->add_option("--event", event_name,
                     "significant | nonsignificant | significant_positive | "
                     "nonsignificant_positive | significant_negative | nonsignificant_negative")
        ->capture_default_str();
    po_grid.add_to(post);
    po_out.add_to(post);

    nonsig::VerifyOptions vo;
    std::string verify_out;
    auto* verify = app.add_subcommand("verify", "Compare every closed form with simulation");
    verify->add_option("--draws", vo.draws, "Simulated replications")->capture_default_str();
    verify->add_option("--seed", vo.seed, "Generator seed")->capture_default_str();
    verify->add_option("--z-threshold", vo.z_threshold, "Pass threshold for z statistics")
        ->capture_default_str();
    verify->add_option("--threads", vo.shards, "Simulation shards")->capture_default_str();
    verify->add_option("--out", verify_out, "Report path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*fig1) {
            f1.grid = f1_grid.resolve(nonsig::GridSpec::around(f1.prior));
            f1_out.emit(nonsig::figure1(f1));
        } else if (*fig5) {
            f1.grid = f1_grid.resolve(nonsig::GridSpec::around(f1.prior));
            f1_out.emit(nonsig::figure5(f1));
        } else if (*fig2) {
            f2.grid = f2_grid.resolve(nonsig::GridSpec::around(f2.prior));
            f2_out.emit(nonsig::figure2(f2));
        } else if (*fig3) {
            f3_out.emit(nonsig::figure3(f3));
        } else if (*fig4) {
            f4.grid = f4_grid.resolve(f4.default_grid());
            f4_out.emit(nonsig::figure4(f4));
        } else if (*post) {
            const auto event = nonsig::parse_significance_event(event_name);
            if (!event) throw nonsig::PreconditionError("unknown event '" + event_name + "'");
            po.event = *event;
            po.grid = po_grid.resolve(nonsig::GridSpec::around(po.prior));
            po_out.emit(nonsig::posterior_table(po));
        } else if (*verify) {
            vo.validate();
            const auto report = nonsig::run_verification(vo);
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
            const std::string text = nonsig::format_report(report);
            if (verify_out.empty() || verify_out == "-") {
                std::cout << text;
            } else {
                std::ofstream os(verify_out, std::ios::binary);
                if (!os) throw std::runtime_error("cannot open " + verify_out);
                os << text;
            }
            return report.all_passed() ? 0 : kExitCheckFailure;
        }
    } catch (const nonsig::PreconditionError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nonsig::DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailure;
    }
    return 0;
}
