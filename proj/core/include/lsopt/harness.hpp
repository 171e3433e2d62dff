#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lsopt/optimizers.hpp"
#include "lsopt/problems.hpp"
#include "lsopt/trace.hpp"

namespace lsopt {

/// Flat experiment description, loadable from a flat JSON document. Fields
/// not meaningful for the chosen problem are ignored.
struct ExperimentConfig {
    std::string problem = "logistic"; // logistic | lasso | rosenbrock |
                                      // matrix_factorization | example1 | example2
    std::string dataset = "synth_logistic"; // registry name or a file path

    // synthetic instance sizes
    int n = 500;
    int d = 20;
    int sparsity = 10;
    double noise = 0.05;
    double lambda = 0.1;       // lasso regularization weight
    std::string gamma = "paper"; // logistic L2 weight: "paper" -> Lbar/(10 n), or a number
    int mf_rows = 60;
    int mf_cols = 45;
    int mf_rank = 5;
    double mf_density = 0.2;

    std::vector<std::string> methods = {"gd"}; // gd | agd | adagrad | fista
    bool include_baseline = false;             // fixed-step variant per method
    std::vector<double> rho_regular = {0.2, 0.3, 0.5, 0.6};
    std::vector<double> rho_adaptive = {0.3};
    /// Seeds for the alpha0 grid. Multipliers of 1/L when the problem carries
    /// a smoothness hint, absolute step sizes otherwise.
    std::vector<double> alpha0_multipliers = {1e1, 1e2, 1e3, 1e4};

    double c = 1e-4;
    double c_agd = 0.5;
    double epsilon = 0.01;
    std::string policy = "restarting"; // restarting | monotone (proximal runs are monotone)
    int max_adjustments = 200;

    std::optional<double> precision; // default: per-dataset table, else 1e-9
    std::optional<double> grad_norm_target;
    int max_iterations = 10000;
    double agd_m = 0.0; // 0 -> problem hint
    std::string fista_anchor = "fresh"; // fresh | lagged

    std::uint64_t seed = 1;
    int threads = 0; // 0 -> hardware concurrency
    std::string metric = "fevals"; // fevals | elapsed
    std::string data_dir;
    int reference_budget_multiplier = 10;
};

/// Parses a flat JSON object; unknown keys and type mismatches are
/// ConfigErrors so a bad grid is rejected before any run starts.
ExperimentConfig load_experiment_config(const std::string& path);

/// Instantiated problem plus everything the grid needs to label its runs.
struct ProblemInstance {
    ProblemDefinition problem;
    Vector x0;
    std::string label;
    double alpha_scale = 1.0;        // alpha0 = multiplier * alpha_scale
    std::optional<double> baseline_alpha;
    double precision = 1e-9;
    std::uint64_t seed = 0;
};

ProblemInstance build_problem_instance(const ExperimentConfig& config);

struct GridOutcome {
    std::vector<RunTrace> traces;
    double reference_value = 0.0;
    double precision = 1e-9;
    std::string problem_label;
};

/// Runs the method x mode x rho x alpha0 grid described by `config` on a
/// bounded worker pool. Cell traces are deterministic given the seed and
/// ordered like the cell list regardless of scheduling.
GridOutcome run_grid(const ExperimentConfig& config);

struct VariantSummary {
    std::string variant; // e.g. "gd-adaptive-rho0.3"
    std::string method;
    std::string mode;
    double rho = 0.0;
    double f_evals_avg = 0.0;
    double grad_evals_avg = 0.0;
    double elapsed_avg = 0.0;
    int cells = 0;
    int reached = 0;  // cells that hit the precision target
    int diverged = 0; // cells excluded from the averages
    std::optional<double> gain;
};

struct ComparisonSummary {
    std::vector<VariantSummary> variants;
    std::optional<double> gain; // best adaptive vs best regular, single-method grids
    std::string metric = "fevals";
    double precision = 1e-9;
};

/// Groups traces into variants, reads counters at the first row reaching the
/// precision target (final row when never reached, mirroring the asterisk
/// convention), averages over the alpha0 grid with diverged cells excluded,
/// and computes each adaptive variant's gain against the best regular
/// variant of the same method.
ComparisonSummary summarize(const std::vector<RunTrace>& traces, double precision,
                            const std::string& metric);

/// Trace CSV: `# key=value` header comments, then
/// iter,objective,gap,alpha,f_evals,grad_evals,crit_evals,prox_evals,elapsed_s
/// with floating-point fields carrying 17 significant digits.
void emit_trace_csv(const RunTrace& trace, std::ostream& out);
RunTrace parse_trace_csv(std::istream& in);

/// Summary CSV:
/// variant,rho,mode,f_evals_avg,grad_evals_avg,elapsed_avg,reached_precision,gain,diverged
void emit_summary_csv(const ComparisonSummary& summary, std::ostream& out);

/// Canonical file name for a cell's trace inside the output directory.
std::string trace_file_name(const RunTrace& trace);

/// Writes one CSV per trace plus summary.csv into `out_dir` (created if
/// missing) and returns the summary.
ComparisonSummary write_grid_outputs(const GridOutcome& outcome, const std::string& out_dir,
                                     const std::string& metric);

/// Loads every trace_*.csv in `dir`.
std::vector<RunTrace> load_traces(const std::string& dir);

struct GradientAuditResult {
    double max_rel_error = 0.0;
    int points = 0;
};

/// Central-difference audit (step 1e-6*(1+||x||)) of the analytic gradient
/// against the smooth part of the objective at seeded random points.
GradientAuditResult gradient_audit(const ProblemDefinition& problem, int points,
                                   std::uint64_t seed);

/// Small seeded instances for the `gradcheck` subcommand: logistic, lasso,
/// rosenbrock, matrix_factorization, example1, example2.
ProblemDefinition gradcheck_problem(const std::string& name, std::uint64_t seed);

} // namespace lsopt
