// Command-line front end: runs experiment grids, summarizes traces, audits
// gradients, and replays the worked line-search examples.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lsopt/datasets.hpp"
#include "lsopt/harness.hpp"
#include "lsopt/linesearch.hpp"
#include "lsopt/problems.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitPrecisionNotReached = 3;

void print_summary(const lsopt::ComparisonSummary& summary) {
    std::printf("%-28s %10s %12s %12s %12s %8s %8s\n", "variant", "rho", "f_evals", "grad_evals",
                "elapsed_s", "reached", "gain");
    for (const auto& v : summary.variants) {
        std::printf("%-28s %10g %12.1f %12.1f %12.4f %5d/%-2d ", v.variant.c_str(), v.rho,
                    v.f_evals_avg, v.grad_evals_avg, v.elapsed_avg, v.reached, v.cells);
        if (v.gain) std::printf("%7.3f\n", *v.gain);
        else std::printf("%7s\n", "-");
    }
    if (summary.gain) std::printf("overall gain (%s): %.3f\n", summary.metric.c_str(), *summary.gain);
}

bool all_reached(const lsopt::ComparisonSummary& summary) {
    for (const auto& v : summary.variants)
        if (v.reached + v.diverged < v.cells) return false;
    return true;
}

int do_run(const std::string& config_path, const std::string& out_dir,
           std::optional<std::uint64_t> seed, const std::string& metric,
           const std::string& data_dir, bool strict) {
    lsopt::ExperimentConfig config = lsopt::load_experiment_config(config_path);
    if (seed) config.seed = *seed;
    if (!metric.empty()) config.metric = metric;
    if (!data_dir.empty()) config.data_dir = data_dir;

    const auto outcome = lsopt::run_grid(config);
    const auto summary = lsopt::write_grid_outputs(outcome, out_dir, config.metric);
    std::printf("problem %s, reference value %.12g, precision %g, %zu traces -> %s\n",
                outcome.problem_label.c_str(), outcome.reference_value, outcome.precision,
                outcome.traces.size(), out_dir.c_str());
    print_summary(summary);
    if (strict && !all_reached(summary)) return kExitPrecisionNotReached;
    return kExitOk;
}

int do_compare(const std::string& out_dir, std::string metric,
               std::optional<double> precision_override, bool strict) {
    if (!std::filesystem::is_directory(out_dir)) {
        std::fprintf(stderr, "not a directory: %s\n", out_dir.c_str());
        return kExitConfigError;
    }
    const auto traces = lsopt::load_traces(out_dir);
    if (traces.empty()) {
        std::fprintf(stderr, "no trace_*.csv files in %s\n", out_dir.c_str());
        return kExitConfigError;
    }
    double precision = 1e-9;
    if (precision_override) precision = *precision_override;
    else if (const std::string* stored = traces.front().annotation("precision"))
        precision = std::strtod(stored->c_str(), nullptr);

    if (metric.empty()) metric = "fevals";
    const auto summary = lsopt::summarize(traces, precision, metric);
    std::ofstream out(out_dir + "/summary.csv");
    if (!out) throw std::runtime_error("cannot write summary.csv in " + out_dir);
    lsopt::emit_summary_csv(summary, out);
    std::printf("%zu traces, precision %g\n", traces.size(), precision);
    print_summary(summary);
    if (strict && !all_reached(summary)) return kExitPrecisionNotReached;
    return kExitOk;
}

int do_gradcheck(const std::string& name, std::uint64_t seed) {
    const auto problem = lsopt::gradcheck_problem(name, seed);
    const auto report = lsopt::gradient_audit(problem, 100, seed);
    const bool ok = report.max_rel_error <= 1e-6;
    std::printf("%s: max relative gradient error %.3g over %d points [%s]\n", name.c_str(),
                report.max_rel_error, report.points, ok ? "ok" : "MISMATCH");
    return ok ? kExitOk : kExitRuntimeError;
}

int do_replicate_examples() {
    using namespace lsopt;
    int failures = 0;
    auto check = [&](const char* what, bool ok) {
        std::printf("  %-58s %s\n", what, ok ? "ok" : "MISMATCH");
        if (!ok) ++failures;
    };

    std::printf("scalar quadratic example (x^2 from x = -1, c = 1/4):\n");
    ArmijoContext parabola;
    parabola.base_value = 1.0;
    parabola.directional_derivative = -4.0;
    parabola.trial_evaluator = [](double alpha) {
        const double x = -1.0 + 2.0 * alpha;
        return x * x;
    };
    BacktrackConfig config;
    config.c = 0.25;
    config.alpha0 = 1.0;
    config.rho = 0.75;
    auto result = backtrack_armijo(parabola, config);
    check("rho=0.75 accepts 0.75 after one adjustment",
          std::abs(result.accepted_alpha - 0.75) <= 1e-12 && result.criterion_evals == 2);
    config.rho = 0.8;
    result = backtrack_armijo(parabola, config);
    check("rho=0.8 accepts 0.64 after two adjustments",
          std::abs(result.accepted_alpha - 0.64) <= 1e-12 && result.criterion_evals == 3);

    std::printf("oscillatory example (cos x - x/(5 pi) from x = pi/2, c = 1/(2 pi)):\n");
    const double pi = std::numbers::pi;
    const double a = 1.0 / (5.0 * pi);
    const double c = 1.0 / (2.0 * pi);
    const double x0 = pi / 2.0;
    const double d = 1.0 + a;
    ArmijoContext wave;
    wave.base_value = std::cos(x0) - a * x0;
    wave.directional_derivative = -d * d;
    wave.trial_evaluator = [=](double alpha) {
        const double x = x0 + alpha * d;
        return std::cos(x) - a * x;
    };
    check("the step reaching 3 pi is feasible",
          armijo_violation(wave, (3.0 * pi - x0) / d, c).feasible);
    check("the smaller step reaching 2 pi is not",
          !armijo_violation(wave, (2.0 * pi - x0) / d, c).feasible);
    config.c = c;
    config.alpha0 = (7.0 * pi / 2.0) / d;
    config.rho = 5.0 / 7.0;
    check("rho=5/7 needs one adjustment from the 7 pi/2 step",
          backtrack_armijo(wave, config).adjustments == 1);
    config.rho = 3.0 / 7.0;
    check("rho=3/7 needs two adjustments",
          backtrack_armijo(wave, config).adjustments == 2);

    return failures == 0 ? kExitOk : kExitRuntimeError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"line-search optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", metric, data_dir, problem_name;
    std::optional<std::uint64_t> seed;
    std::optional<double> precision;
    bool strict = false;

    auto* run_cmd = app.add_subcommand("run", "execute an experiment grid from a config file");
    run_cmd->add_option("--config", config_path, "experiment config (flat JSON)")->required();
    run_cmd->add_option("--out", out_dir, "output directory for trace and summary CSVs");
    run_cmd->add_option("--seed", seed, "override the config seed");
    run_cmd->add_option("--metric", metric, "comparison metric (fevals|elapsed)");
    run_cmd->add_option("--data-dir", data_dir, "dataset directory (else $LSOPT_DATA_DIR)");
    run_cmd->add_flag("--strict", strict, "exit 3 when a variant misses the precision target");

    auto* compare_cmd = app.add_subcommand("compare", "summarize previously written traces");
    compare_cmd->add_option("--out", out_dir, "directory holding trace_*.csv files");
    compare_cmd->add_option("--metric", metric, "comparison metric (fevals|elapsed)");
    compare_cmd->add_option("--precision", precision, "override the stored precision target");
    compare_cmd->add_flag("--strict", strict, "exit 3 when a variant misses the precision target");

    auto* gradcheck_cmd =
        app.add_subcommand("gradcheck", "finite-difference audit of a named problem");
    gradcheck_cmd->add_option("problem", problem_name, "logistic|lasso|rosenbrock|"
                                                       "matrix_factorization|example1|example2")
        ->required();
    std::uint64_t gradcheck_seed = 1;
    gradcheck_cmd->add_option("--seed", gradcheck_seed, "instance seed");

    auto* replicate_cmd =
        app.add_subcommand("replicate-examples", "replay the worked line-search examples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (run_cmd->parsed()) return do_run(config_path, out_dir, seed, metric, data_dir, strict);
        if (compare_cmd->parsed()) return do_compare(out_dir, metric, precision, strict);
        if (gradcheck_cmd->parsed()) return do_gradcheck(problem_name, gradcheck_seed);
        if (replicate_cmd->parsed()) return do_replicate_examples();
    } catch (const lsopt::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntimeError;
    }
    return kExitConfigError;
}
