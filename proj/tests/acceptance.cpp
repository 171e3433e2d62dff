// Acceptance suite: each criterion prints one PASS/FAIL line; the process
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lsopt/datasets.hpp"
#include "lsopt/harness.hpp"
#include "lsopt/linesearch.hpp"
#include "lsopt/optimizers.hpp"
#include "lsopt/problems.hpp"
#include "test_support.hpp"

using namespace lsopt;
using test_support::armijo_context;
using test_support::finite_difference_gradient;
using test_support::random_quadratic;
using test_support::random_vector;
using test_support::relative_error;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %02d %s%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ArmijoContext worked_example_context() {
    ArmijoContext ctx;
    ctx.base_value = 1.0;
    ctx.directional_derivative = -4.0;
    ctx.trial_evaluator = [](double alpha) {
        const double x = -1.0 + 2.0 * alpha;
        return x * x;
    };
    return ctx;
}

// ---------------------------------------------------------------------------

void criterion_1_worked_example_exact() {
    BacktrackConfig config;
    config.c = 0.25;
    config.alpha0 = 1.0;

    Stopwatch watch;
    config.rho = 0.75;
    const auto first = backtrack_armijo(worked_example_context(), config);
    config.rho = 0.8;
    const auto second = backtrack_armijo(worked_example_context(), config);
    const double ms = watch.seconds() * 1e3;

    const bool pass = std::abs(first.accepted_alpha - 0.75) <= 1e-12 &&
                      first.criterion_evals == 2 &&
                      std::abs(second.accepted_alpha - 0.64) <= 1e-12 &&
                      second.criterion_evals == 3 && ms < 1.0;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "rho=0.75: alpha=%.15g evals=%d; rho=0.8: alpha=%.15g evals=%d; %.3f ms",
                  first.accepted_alpha, first.criterion_evals, second.accepted_alpha,
                  second.criterion_evals, ms);
    report(1, "worked scalar example replication", pass, detail);
}

void criterion_2_oscillatory_example_exact() {
    const double pi = std::numbers::pi;
    const double a = 1.0 / (5.0 * pi);
    const double c = 1.0 / (2.0 * pi);
    const double x0 = pi / 2.0;
    const double d = 1.0 + a;

    ArmijoContext ctx;
    ctx.base_value = std::cos(x0) - a * x0;
    ctx.directional_derivative = -d * d;
    ctx.trial_evaluator = [&](double alpha) {
        const double x = x0 + alpha * d;
        return std::cos(x) - a * x;
    };

    const double reach_3pi = (3.0 * pi - x0) / d;
    const double reach_2pi = (2.0 * pi - x0) / d;
    const bool outer_feasible = armijo_violation(ctx, reach_3pi, c).feasible;
    const bool inner_infeasible = !armijo_violation(ctx, reach_2pi, c).feasible;

    BacktrackConfig config;
    config.c = c;
    config.alpha0 = (7.0 * pi / 2.0) / d;
    config.rho = 5.0 / 7.0;
    const auto wide = backtrack_armijo(ctx, config);
    config.rho = 3.0 / 7.0;
    const auto narrow = backtrack_armijo(ctx, config);

    const bool pass = outer_feasible && inner_infeasible && wide.adjustments == 1 &&
                      narrow.adjustments == 2;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "3pi step feasible=%d, 2pi step feasible=%d, adjustments rho=5/7: %d, "
                  "rho=3/7: %d",
                  int(outer_feasible), int(!inner_infeasible), wide.adjustments,
                  narrow.adjustments);
    report(2, "oscillatory example replication", pass, detail);
}

// Random convex instances shared by criteria 3 and 4: half separable
// quadratics, half small logistic problems.
struct ConvexInstance {
    std::function<double(const Vector&)> value;
    Vector x;
    Vector gradient;
};

ConvexInstance draw_convex_instance(std::mt19937_64& rng, int trial) {
    ConvexInstance instance;
    if (trial % 2 == 0) {
        const auto quad = random_quadratic(rng, 6);
        instance.x = random_vector(rng, 6);
        instance.value = [quad](const Vector& p) { return quad.value(p); };
        instance.gradient = quad.gradient(instance.x);
    } else {
        static std::vector<ProblemDefinition> pool = [] {
            std::vector<ProblemDefinition> problems;
            for (std::uint64_t seed = 0; seed < 8; ++seed) {
                const auto synthesis = synth_logistic(40, 6, 1000 + seed);
                problems.push_back(logistic_objective(to_sparse_matrix(synthesis.data),
                                                      labels_vector(synthesis.data), 1e-3));
            }
            return problems;
        }();
        const auto& problem = pool[std::size_t(trial / 2) % pool.size()];
        instance.x = random_vector(rng, 6, 2.0);
        instance.value = problem.value;
        instance.gradient = problem.gradient(instance.x);
    }
    return instance;
}

void criterion_3_feasibility_monotone() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> alpha_draw(-1.0, 3.0);
    int checked = 0, failed = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto instance = draw_convex_instance(rng, trial);
        if (instance.gradient.norm() < 1e-10) continue;
        const Vector d = -instance.gradient;
        const auto ctx = armijo_context(instance.value, instance.gradient, instance.x, d);

        BacktrackConfig config;
        config.rho = 0.5;
        config.c = 1e-2;
        config.alpha0 = std::pow(10.0, alpha_draw(rng));
        const auto result = backtrack_armijo(ctx, config);
        if (result.terminated_by_cap) continue;
        ++checked;
        for (double fraction : {0.5, 0.1})
            if (!armijo_violation(ctx, fraction * result.accepted_alpha, config.c).feasible)
                ++failed;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d accepted steps sub-probed, %d failures", checked,
                  failed);
    report(3, "convex feasibility is monotone below accepted steps", checked >= 900 && failed == 0,
           detail);
}

void criterion_4_adaptive_never_more_evals() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> rho_draw(0.05, 0.95);
    std::uniform_real_distribution<double> c_draw(1e-4, 0.9);
    std::uniform_real_distribution<double> alpha_draw(-1.0, 4.0);
    int checked = 0, failed = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto instance = draw_convex_instance(rng, trial);
        if (instance.gradient.norm() < 1e-10) continue;
        Vector d = -instance.gradient + 0.2 * random_vector(rng, 6);
        if (instance.gradient.dot(d) >= 0.0) d = -instance.gradient;
        const auto ctx = armijo_context(instance.value, instance.gradient, instance.x, d);

        BacktrackConfig config;
        config.rho = rho_draw(rng);
        config.c = c_draw(rng);
        config.epsilon = std::min(0.01, 0.5 * config.rho);
        config.alpha0 = std::pow(10.0, alpha_draw(rng));

        config.mode = BacktrackMode::Regular;
        const auto regular = backtrack_armijo(ctx, config);
        config.mode = BacktrackMode::Adaptive;
        const auto adaptive = backtrack_armijo(ctx, config);
        if (regular.terminated_by_cap || adaptive.terminated_by_cap) continue;
        ++checked;
        if (adaptive.criterion_evals > regular.criterion_evals) ++failed;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d compatible calls compared, %d failures", checked,
                  failed);
    report(4, "adaptive search never needs more evaluations (convex)", checked >= 900 && failed == 0,
           detail);
}

void criterion_5_step_size_floors() {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> rho_draw(0.1, 0.9);
    std::uniform_real_distribution<double> c_draw(1e-4, 0.9);
    std::uniform_real_distribution<double> alpha_draw(-2.0, 3.0);
    int failed = 0;

    for (int trial = 0; trial < 500; ++trial) {
        const auto quad = random_quadratic(rng, 5);
        const Vector x = random_vector(rng, 5);
        const Vector g = quad.gradient(x);
        if (g.norm() < 1e-10) continue;
        const double L = quad.smoothness();

        BacktrackConfig config;
        config.rho = rho_draw(rng);
        config.c = c_draw(rng);
        config.epsilon = std::min(0.01, 0.5 * config.rho);
        config.alpha0 = std::pow(10.0, alpha_draw(rng));
        config.mode = trial % 2 ? BacktrackMode::Adaptive : BacktrackMode::Regular;

        auto value = [&](const Vector& p) { return quad.value(p); };
        const auto result = backtrack_armijo(armijo_context(value, g, x, -g), config);
        const double floor = std::min(config.alpha0, config.rho * 2.0 * (1.0 - config.c) / L);
        if (result.terminated_by_cap || result.accepted_alpha < floor - 1e-12) ++failed;
    }

    for (int trial = 0; trial < 500; ++trial) {
        const auto quad = random_quadratic(rng, 5);
        const Vector y = random_vector(rng, 5);
        const double L = quad.smoothness();

        DescentLemmaContext ctx;
        ctx.anchor_point = y;
        ctx.smooth_value_at_anchor = 0.5 * y.dot(quad.q.asDiagonal() * y);
        ctx.gradient_at_anchor = quad.q.asDiagonal() * y;
        const bool with_l1 = trial % 3 == 0;
        ctx.prox_evaluator = [&](double alpha) {
            Vector p = y - alpha * ctx.gradient_at_anchor;
            if (with_l1) p = soft_threshold(p, 0.05 * alpha);
            return std::make_pair(p, 0.5 * p.dot(quad.q.asDiagonal() * p));
        };

        BacktrackConfig config;
        config.rho = rho_draw(rng);
        config.alpha0 = std::pow(10.0, alpha_draw(rng)) / L;
        config.mode = trial % 2 ? BacktrackMode::Adaptive : BacktrackMode::Regular;
        const auto result = backtrack_descent_lemma(ctx, config);
        const double floor = std::min(config.alpha0, config.rho / L);
        if (result.search.terminated_by_cap || result.search.accepted_alpha < floor - 1e-12)
            ++failed;
    }

    char detail[96];
    std::snprintf(detail, sizeof detail, "1000 searches (both criteria, both modes), %d failures",
                  failed);
    report(5, "accepted steps respect the theoretical floors", failed == 0, detail);
}

void criterion_6_eval_count_ceiling() {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> spread(0.5, 3.0);
    int failed = 0, instances = 0;

    for (double rho : {0.3, 0.5, 0.9}) {
        for (int mode = 0; mode < 2; ++mode) {
            for (int trial = 0; trial < 25; ++trial) {
                auto quad = random_quadratic(rng, 5, 0.5, 20.0);
                // Homogeneous quadratics keep the violation scale-invariant,
                // so the count stays exact over the whole horizon.
                quad.b.setZero();
                const double L = quad.smoothness();
                const double c = 1e-4;
                const double alpha_bar = 2.0 * (1.0 - c) / L;

                ProblemDefinition problem;
                problem.dimension = 5;
                problem.value = [quad](const Vector& p) { return quad.value(p); };
                problem.smooth_value = problem.value;
                problem.gradient = [quad](const Vector& p) { return quad.gradient(p); };

                BacktrackConfig config;
                config.rho = rho;
                config.c = c;
                config.policy = StepPolicy::Monotone;
                config.alpha0 = alpha_bar * std::pow(10.0, spread(rng));
                config.mode = mode ? BacktrackMode::Adaptive : BacktrackMode::Regular;

                RunSettings settings;
                settings.method = Method::GD;
                settings.step_source = StepSource::line_search(config, CriterionKind::Armijo);
                settings.stopping.max_iterations = 100;
                settings.x0 = random_vector(rng, 5, 2.0);
                const auto trace = run(problem, settings);

                const double budget =
                    std::floor(std::log(alpha_bar / config.alpha0) / std::log(rho)) + 1.0;
                ++instances;
                for (std::size_t k = 1; k < trace.rows.size(); ++k) {
                    if (double(trace.rows[k].counters.criterion_evals) > budget + double(k)) {
                        ++failed;
                        break;
                    }
                }
            }
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d monotone runs over 100 iterations, %d failures",
                  instances, failed);
    report(6, "monotone evaluation-count ceiling", failed == 0, detail);
}

void criterion_7_violation_closed_form() {
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> L_draw(0.5, 50.0);
    std::uniform_real_distribution<double> ratio_draw(std::log(0.02), std::log(50.0));
    std::uniform_int_distribution<int> dim_draw(1, 20);
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        const double L = L_draw(rng);
        const double alpha = std::exp(ratio_draw(rng)) / L;
        const int dim = dim_draw(rng);
        Vector y = random_vector(rng, dim, 2.0);
        if (y.norm() < 1e-8) y[0] = 1.0;

        DescentLemmaContext ctx;
        ctx.anchor_point = y;
        ctx.smooth_value_at_anchor = 0.5 * L * y.squaredNorm();
        ctx.gradient_at_anchor = L * y;
        ctx.prox_evaluator = [&](double a) {
            Vector p = (1.0 - a * L) * y;
            return std::make_pair(p, 0.5 * L * p.squaredNorm());
        };
        const auto probe = descent_lemma_violation(ctx, alpha);
        worst = std::max(worst, std::abs(probe.violation - 1.0 / (L * alpha)) * (L * alpha));
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "2000 instances, worst relative error %.3g", worst);
    report(7, "quadratic-bound violation matches 1/(L alpha)", worst <= 1e-10, detail);
}

void criterion_8_gradient_audits() {
    Stopwatch watch;
    std::mt19937_64 rng(127);
    double worst = 0.0;
    std::string worst_name = "-";

    struct Audit {
        const char* name;
        ProblemDefinition problem;
        std::function<double(const Vector&)> value; // smooth part
    };
    std::vector<Audit> audits;
    {
        const auto synthesis = synth_logistic(200, 12, 501);
        auto problem = logistic_objective(to_sparse_matrix(synthesis.data),
                                          labels_vector(synthesis.data), 1e-3);
        audits.push_back({"logistic", problem, problem.value});
    }
    {
        const auto synthesis = synth_linear_inverse(40, 25, 6, 0.05, 503);
        auto problem = lasso_objective(synthesis.A, synthesis.y, 0.3);
        audits.push_back({"lasso-smooth", problem, problem.smooth_value});
    }
    audits.push_back({"rosenbrock", rosenbrock_objective(), rosenbrock_objective().value});
    {
        auto problem = matrix_factorization_objective(synth_ratings_matrix(12, 9, 0.4, 505), 3);
        audits.push_back({"matrix-factorization", problem, problem.value});
    }

    for (const auto& audit : audits) {
        for (int k = 0; k < 100; ++k) {
            const Vector x = random_vector(rng, audit.problem.dimension);
            const double err =
                relative_error(audit.problem.gradient(x), finite_difference_gradient(audit.value, x));
            if (err > worst) {
                worst = err;
                worst_name = audit.name;
            }
        }
    }
    const double secs = watch.seconds();
    char detail[128];
    std::snprintf(detail, sizeof detail, "400 points, worst %.3g (%s), %.2f s", worst,
                  worst_name.c_str(), secs);
    report(8, "analytic gradients match the difference oracle", worst <= 1e-6 && secs < 30.0,
           detail);
}

void criterion_9_rosenbrock_directional() {
    Stopwatch watch;
    const auto problem = rosenbrock_objective();

    auto run_variant = [&](Method method, double rho, double c, BacktrackMode mode) {
        BacktrackConfig config;
        config.rho = rho;
        config.c = c;
        config.epsilon = 0.01;
        config.alpha0 = 0.1;
        config.mode = mode;
        RunSettings settings;
        settings.method = method;
        settings.agd_m = 0.1;
        settings.step_source = StepSource::line_search(config, CriterionKind::Armijo);
        settings.stopping.max_iterations = 1000;
        settings.x0 = Vector::Zero(2);
        return run(problem, settings);
    };

    const auto gd_regular = run_variant(Method::GD, 0.3, 1e-4, BacktrackMode::Regular);
    const auto gd_adaptive = run_variant(Method::GD, 0.3, 1e-4, BacktrackMode::Adaptive);
    const auto agd_regular = run_variant(Method::AGD, 0.9, 0.5, BacktrackMode::Regular);
    const auto agd_adaptive = run_variant(Method::AGD, 0.9, 0.5, BacktrackMode::Adaptive);

    auto loss = [](const RunTrace& t) { return t.rows.back().objective; };
    auto fevals = [](const RunTrace& t) { return t.rows.back().counters.objective_evals; };

    const bool gd_ok =
        loss(gd_adaptive) <= loss(gd_regular) && fevals(gd_adaptive) < fevals(gd_regular);
    const bool agd_ok =
        loss(agd_adaptive) <= loss(agd_regular) && fevals(agd_adaptive) < fevals(agd_regular);
    const double secs = watch.seconds();

    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "gd loss %.3g vs %.3g, #f %ld vs %ld; agd loss %.3g vs %.3g, #f %ld vs %ld; "
                  "%.2f s",
                  loss(gd_adaptive), loss(gd_regular), fevals(gd_adaptive), fevals(gd_regular),
                  loss(agd_adaptive), loss(agd_regular), fevals(agd_adaptive),
                  fevals(agd_regular), secs);
    report(9, "valley-function runs favor the adaptive factor", gd_ok && agd_ok && secs < 10.0,
           detail);
}

void criterion_10_logistic_directional() {
    Stopwatch watch;
    ExperimentConfig config;
    config.problem = "logistic";
    config.dataset = "synth_logistic";
    config.n = 500;
    config.d = 20;
    config.methods = {"gd"};
    config.rho_regular = {0.2, 0.3, 0.5, 0.6};
    config.rho_adaptive = {0.3};
    config.alpha0_multipliers = {1e1, 1e2, 1e3, 1e4};
    config.c = 1e-4;
    config.epsilon = 0.01;
    config.policy = "restarting";
    config.precision = 1e-6;
    config.max_iterations = 150000;
    config.seed = 42;
    config.threads = 0;

    const auto outcome = run_grid(config);
    const auto summary = summarize(outcome.traces, outcome.precision, "fevals");

    const VariantSummary* adaptive = nullptr;
    double best_regular = std::numeric_limits<double>::infinity();
    for (const auto& variant : summary.variants) {
        if (variant.mode == "adaptive") adaptive = &variant;
        if (variant.mode == "regular") best_regular = std::min(best_regular, variant.f_evals_avg);
    }
    const double secs = watch.seconds();

    bool pass = adaptive != nullptr && adaptive->reached == adaptive->cells &&
                adaptive->gain.has_value() && *adaptive->gain > 0.0 &&
                adaptive->f_evals_avg < best_regular && secs < 60.0;
    char detail[192];
    std::snprintf(detail, sizeof detail,
                  "adaptive #f %.1f (reached %d/%d) vs best regular %.1f, gain %.3f, %.1f s",
                  adaptive ? adaptive->f_evals_avg : -1.0, adaptive ? adaptive->reached : 0,
                  adaptive ? adaptive->cells : 0, best_regular,
                  adaptive && adaptive->gain ? *adaptive->gain : -1.0, secs);
    report(10, "logistic grid: adaptive beats the best regular variant", pass, detail);
}

void criterion_11_proximal_directional() {
    Stopwatch watch;
    ExperimentConfig config;
    config.problem = "lasso";
    config.dataset = "synth_lasso";
    config.n = 128;
    config.d = 256;
    config.sparsity = 10;
    config.noise = 0.02;
    config.lambda = 0.5;
    config.methods = {"fista"};
    config.rho_regular = {0.5, 1.0 / 3.0, 0.2};
    config.rho_adaptive = {1.0 / 1.1};
    config.alpha0_multipliers = {1e1, 1e2, 1e3, 1e4};
    config.precision = 1e-8;
    config.max_iterations = 20000;
    config.seed = 11;
    config.threads = 0;

    const auto outcome = run_grid(config);
    const auto summary = summarize(outcome.traces, outcome.precision, "fevals");

    const VariantSummary* adaptive = nullptr;
    double best_regular_grads = std::numeric_limits<double>::infinity();
    for (const auto& variant : summary.variants) {
        if (variant.mode == "adaptive") adaptive = &variant;
        if (variant.mode == "regular")
            best_regular_grads = std::min(best_regular_grads, variant.grad_evals_avg);
    }

    bool monotone = true;
    for (const auto& trace : outcome.traces)
        for (std::size_t i = 2; i < trace.rows.size(); ++i)
            if (trace.rows[i].alpha > trace.rows[i - 1].alpha * (1.0 + 1e-12)) monotone = false;

    const double secs = watch.seconds();
    const bool pass = adaptive != nullptr && adaptive->reached == adaptive->cells &&
                      adaptive->grad_evals_avg <= best_regular_grads && monotone && secs < 60.0;
    char detail[192];
    std::snprintf(detail, sizeof detail,
                  "adaptive #grad %.1f (reached %d/%d) vs best regular %.1f, monotone=%d, %.1f s",
                  adaptive ? adaptive->grad_evals_avg : -1.0, adaptive ? adaptive->reached : 0,
                  adaptive ? adaptive->cells : 0, best_regular_grads, int(monotone), secs);
    report(11, "proximal grid: adaptive matches or beats regular gradients", pass, detail);
}

void criterion_12_determinism() {
    ExperimentConfig config;
    config.problem = "logistic";
    config.dataset = "synth_logistic";
    config.n = 120;
    config.d = 8;
    config.methods = {"gd", "adagrad"};
    config.include_baseline = true;
    config.rho_regular = {0.3};
    config.rho_adaptive = {0.3};
    config.alpha0_multipliers = {10.0, 1000.0};
    config.precision = 1e-6;
    config.max_iterations = 3000;
    config.seed = 5;
    config.threads = 2;

    auto render = [](const GridOutcome& outcome) {
        std::vector<std::string> files;
        for (const auto& trace : outcome.traces) {
            std::ostringstream out;
            emit_trace_csv(trace, out);
            // drop the elapsed column (always the last field of data rows)
            std::istringstream in(out.str());
            std::string line, stripped;
            while (std::getline(in, line)) {
                if (!line.empty() && line.front() != '#') {
                    const auto comma = line.rfind(',');
                    if (comma != std::string::npos) line.erase(comma);
                }
                stripped += line;
                stripped += '\n';
            }
            files.push_back(trace_file_name(trace) + "\n" + stripped);
        }
        return files;
    };

    const auto first = render(run_grid(config));
    const auto second = render(run_grid(config));
    bool pass = first.size() == second.size();
    if (pass)
        for (std::size_t i = 0; i < first.size(); ++i)
            if (first[i] != second[i]) pass = false;
    char detail[96];
    std::snprintf(detail, sizeof detail, "%zu traces compared byte-for-byte modulo elapsed",
                  first.size());
    report(12, "identical seeds reproduce identical traces", pass, detail);
}

} // namespace

int main() {
    criterion_1_worked_example_exact();
    criterion_2_oscillatory_example_exact();
    criterion_3_feasibility_monotone();
    criterion_4_adaptive_never_more_evals();
    criterion_5_step_size_floors();
    criterion_6_eval_count_ceiling();
    criterion_7_violation_closed_form();
    criterion_8_gradient_audits();
    criterion_9_rosenbrock_directional();
    criterion_10_logistic_directional();
    criterion_11_proximal_directional();
    criterion_12_determinism();

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
