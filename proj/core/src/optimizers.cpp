#include "lsopt/optimizers.hpp"

#include <chrono>
#include <cmath>

namespace lsopt {

StepSource StepSource::fixed(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("fixed step size must be positive");
    StepSource s;
    s.fixed_alpha = alpha;
    return s;
}

StepSource StepSource::line_search(const BacktrackConfig& config, CriterionKind kind) {
    StepSource s;
    s.search = config;
    s.criterion = kind;
    return s;
}

Vector prox_point(const Vector& y, double alpha, const Vector& smooth_gradient,
                  const ProblemDefinition& problem) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    Vector z = y - alpha * smooth_gradient;
    if (!problem.nonsmooth) return z;
    if (!problem.nonsmooth->prox)
        throw NoProxAvailable("objective has no registered proximal map");
    return problem.nonsmooth->prox(z, alpha);
}

double agd_momentum_coefficient(double L_estimate, double m) {
    if (!(m > 0.0) || !(L_estimate >= m))
        throw InvalidStrongConvexity("need 0 < m <= L");
    const double sl = std::sqrt(L_estimate);
    const double sm = std::sqrt(m);
    return (sl - sm) / (sl + sm);
}

double fista_next_t(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

namespace {

LineSearchResult run_armijo_search(const ProblemDefinition& problem, const Vector& x,
                                   const Vector& direction, double directional_derivative,
                                   double base_value, const StepSource& source,
                                   std::optional<double> previous_alpha,
                                   EvalCounters& counters) {
    ArmijoContext ctx;
    ctx.base_value = base_value;
    ctx.directional_derivative = directional_derivative;
    ctx.trial_evaluator = [&](double alpha) { return problem.value(x + alpha * direction); };

    BacktrackConfig config = source.search;
    config.alpha0 = initial_step(config.policy, config.alpha0, previous_alpha);
    LineSearchResult result = backtrack_armijo(ctx, config);
    counters.criterion_evals += result.criterion_evals;
    counters.objective_evals += result.criterion_evals;
    return result;
}

} // namespace

std::optional<LineSearchResult> gd_step(OptimizerState& state, const Vector& gradient,
                                        const StepSource& source, const StepContext& ctx) {
    if (source.is_fixed()) {
        state.x -= *source.fixed_alpha * gradient;
        state.previous_alpha = *source.fixed_alpha;
        return std::nullopt;
    }
    const Vector direction = -gradient;
    LineSearchResult result =
        run_armijo_search(ctx.problem, state.x, direction, -gradient.squaredNorm(),
                          ctx.value_at_x, source, state.previous_alpha, ctx.counters);
    if (result.terminated_by_cap) return result;
    state.x += result.accepted_alpha * direction;
    state.previous_alpha = result.accepted_alpha;
    return result;
}

std::optional<LineSearchResult> agd_step(OptimizerState& state, const Vector& gradient,
                                         double m, const StepSource& source,
                                         const StepContext& ctx) {
    double alpha;
    std::optional<LineSearchResult> result;
    if (source.is_fixed()) {
        alpha = *source.fixed_alpha;
    } else {
        const Vector direction = -gradient;
        LineSearchResult search =
            run_armijo_search(ctx.problem, state.x, direction, -gradient.squaredNorm(),
                              ctx.value_at_x, source, state.previous_alpha, ctx.counters);
        if (search.terminated_by_cap) return search;
        alpha = search.accepted_alpha;
        result = std::move(search);
    }

    // The accepted step doubles as the inverse smoothness estimate.
    double L_estimate = 1.0 / alpha;
    if (L_estimate < m) {
        L_estimate = m;
        ++state.l_estimate_clamps;
    }
    const double beta = agd_momentum_coefficient(L_estimate, m);

    Vector y_next = state.x - alpha * gradient;
    state.x = (1.0 + beta) * y_next - beta * state.y;
    state.y = std::move(y_next);
    state.previous_alpha = alpha;
    return result;
}

std::optional<LineSearchResult> adagrad_step(OptimizerState& state, const Vector& gradient,
                                             const StepSource& source, const StepContext& ctx) {
    state.accumulator.array() += gradient.array().square();

    Vector direction(gradient.size());
    for (Eigen::Index i = 0; i < gradient.size(); ++i) {
        const double s = state.accumulator[i];
        direction[i] = s > 0.0 ? -gradient[i] / std::sqrt(s) : 0.0;
    }

    if (source.is_fixed()) {
        state.x += *source.fixed_alpha * direction;
        state.previous_alpha = *source.fixed_alpha;
        return std::nullopt;
    }
    LineSearchResult result =
        run_armijo_search(ctx.problem, state.x, direction, gradient.dot(direction),
                          ctx.value_at_x, source, state.previous_alpha, ctx.counters);
    if (result.terminated_by_cap) return result;
    state.x += result.accepted_alpha * direction;
    state.previous_alpha = result.accepted_alpha;
    return result;
}

FistaStepOutcome fista_step(OptimizerState& state, const Vector& gradient_at_y,
                            double smooth_value_at_y, const StepSource& source,
                            FistaAnchor anchor, const StepContext& ctx) {
    FistaStepOutcome outcome{};
    Vector fresh;

    if (source.is_fixed()) {
        outcome.accepted_alpha = *source.fixed_alpha;
        fresh = prox_point(state.y, outcome.accepted_alpha, gradient_at_y, ctx.problem);
        ++ctx.counters.prox_evals;
        outcome.smooth_value_at_x = ctx.problem.smooth_value(fresh);
    } else {
        DescentLemmaContext dl;
        dl.anchor_point = state.y;
        dl.smooth_value_at_anchor = smooth_value_at_y;
        dl.gradient_at_anchor = gradient_at_y;
        dl.prox_evaluator = [&](double alpha) {
            Vector p = prox_point(state.y, alpha, gradient_at_y, ctx.problem);
            double value = ctx.problem.smooth_value(p);
            return std::make_pair(std::move(p), value);
        };

        BacktrackConfig config = source.search;
        config.policy = StepPolicy::Monotone; // the estimate only ever tightens
        config.alpha0 = initial_step(config.policy, config.alpha0, state.previous_alpha);
        ProxSearchResult prox_search = backtrack_descent_lemma(dl, config);
        ctx.counters.criterion_evals += prox_search.search.criterion_evals;
        ctx.counters.objective_evals += prox_search.search.criterion_evals;
        ctx.counters.prox_evals += prox_search.search.criterion_evals;
        if (prox_search.search.terminated_by_cap) {
            outcome.search = std::move(prox_search.search);
            return outcome;
        }
        outcome.accepted_alpha = prox_search.search.accepted_alpha;
        outcome.smooth_value_at_x = prox_search.search.accepted_probe.trial_value;
        fresh = std::move(prox_search.accepted_point);
        outcome.search = std::move(prox_search.search);
    }

    outcome.prox_residual_norm = (fresh - state.y).norm() / outcome.accepted_alpha;

    const double t_next = fista_next_t(state.t);
    const double coeff = (state.t - 1.0) / t_next;
    Vector y_next;
    if (anchor == FistaAnchor::FreshIterate)
        y_next = fresh + coeff * (fresh - state.x);
    else
        y_next = state.x + coeff * (state.x - state.x_prev);

    state.x_prev = std::move(state.x);
    state.x = std::move(fresh);
    state.y = std::move(y_next);
    state.t = t_next;
    state.previous_alpha = outcome.accepted_alpha;
    return outcome;
}

namespace {

const char* method_name(Method m) {
    switch (m) {
        case Method::GD: return "gd";
        case Method::AGD: return "agd";
        case Method::Adagrad: return "adagrad";
        case Method::FISTA: return "fista";
    }
    return "?";
}

RunFingerprint make_fingerprint(const RunSettings& settings) {
    RunFingerprint fp;
    fp.method = method_name(settings.method);
    if (settings.step_source.is_fixed()) {
        fp.criterion = "none";
        fp.mode = "fixed";
        fp.policy = "none";
        fp.alpha0 = *settings.step_source.fixed_alpha;
    } else {
        const auto& cfg = settings.step_source.search;
        fp.criterion =
            settings.step_source.criterion == CriterionKind::Armijo ? "armijo" : "descent-lemma";
        fp.mode = cfg.mode == BacktrackMode::Adaptive ? "adaptive" : "regular";
        // proximal searches run monotone regardless of the configured policy
        const bool monotone =
            cfg.policy == StepPolicy::Monotone || settings.method == Method::FISTA;
        fp.policy = monotone ? "monotone" : "restarting";
        fp.rho = cfg.rho;
        fp.c = cfg.c;
        fp.epsilon = cfg.epsilon;
        fp.alpha0 = cfg.alpha0;
    }
    fp.seed = settings.seed;
    return fp;
}

} // namespace

RunTrace run(const ProblemDefinition& problem, const RunSettings& settings,
             const std::function<void(const TraceRow&)>& row_sink) {
    if (settings.x0.size() != problem.dimension)
        throw DimensionMismatch("x0 has wrong dimension");
    const bool searches = !settings.step_source.is_fixed();
    if (settings.method == Method::FISTA && searches &&
        settings.step_source.criterion != CriterionKind::DescentLemma)
        throw std::invalid_argument("proximal runs use the quadratic-bound criterion");
    if (settings.method != Method::FISTA && searches &&
        settings.step_source.criterion != CriterionKind::Armijo)
        throw std::invalid_argument("smooth methods use the sufficient-decrease criterion");

    double m = settings.agd_m;
    if (settings.method == Method::AGD) {
        if (m <= 0.0) m = problem.strong_convexity_hint.value_or(0.0);
        if (m <= 0.0)
            throw InvalidStrongConvexity("acceleration needs a positive strong convexity constant");
    }

    OptimizerState state;
    state.x = settings.x0;
    state.y = settings.x0;
    state.x_prev = settings.x0;
    if (settings.method == Method::Adagrad) state.accumulator = Vector::Zero(problem.dimension);

    RunTrace trace;
    trace.fingerprint = make_fingerprint(settings);

    EvalCounters counters;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    const auto reference = settings.stopping.reference_value;
    auto gap_of = [&](double objective) {
        return reference ? objective - *reference : std::numeric_limits<double>::quiet_NaN();
    };
    auto push_row = [&](int iter, double objective, double alpha) {
        TraceRow row{iter, objective, gap_of(objective), alpha, counters, elapsed()};
        trace.rows.push_back(row);
        if (row_sink) row_sink(row);
    };
    auto finish = [&](TerminationReason reason) {
        trace.termination = reason;
        if (state.l_estimate_clamps > 0)
            trace.annotate("l_clamps", std::to_string(state.l_estimate_clamps));
        return trace;
    };

    double current_value = problem.value(state.x);
    counters.objective_evals = 1;
    push_row(0, current_value, 0.0);

    if (reference && settings.stopping.gap_target &&
        gap_of(current_value) <= *settings.stopping.gap_target)
        return finish(TerminationReason::Precision);

    for (int k = 0; k < settings.stopping.max_iterations; ++k) {
        const bool proximal = settings.method == Method::FISTA;
        const Vector& eval_point = proximal ? state.y : state.x;
        const Vector gradient = problem.gradient(eval_point);
        ++counters.gradient_evals;

        if (!proximal) {
            const double floor = settings.stopping.gradient_norm_target.value_or(0.0);
            if (gradient.norm() <= floor) return finish(TerminationReason::Stationary);
        }

        StepContext ctx{problem, current_value, counters};
        std::optional<LineSearchResult> search;
        double accepted_alpha = 0.0;
        double next_value = 0.0;
        double prox_residual = std::numeric_limits<double>::infinity();

        switch (settings.method) {
            case Method::GD:
                search = gd_step(state, gradient, settings.step_source, ctx);
                break;
            case Method::AGD:
                search = agd_step(state, gradient, m, settings.step_source, ctx);
                break;
            case Method::Adagrad:
                search = adagrad_step(state, gradient, settings.step_source, ctx);
                break;
            case Method::FISTA: {
                // The anchor value rides along with the gradient evaluation;
                // it is not charged to the objective tally.
                const double smooth_at_y = problem.smooth_value(eval_point);
                FistaStepOutcome outcome = fista_step(state, gradient, smooth_at_y,
                                                      settings.step_source,
                                                      settings.fista_anchor, ctx);
                search = outcome.search;
                if (search && search->terminated_by_cap) break;
                accepted_alpha = outcome.accepted_alpha;
                prox_residual = outcome.prox_residual_norm;
                next_value = outcome.smooth_value_at_x;
                if (problem.nonsmooth) next_value += problem.nonsmooth->value(state.x);
                break;
            }
        }

        if (search && search->terminated_by_cap)
            return finish(TerminationReason::CapExceeded);

        if (settings.method != Method::FISTA) {
            if (settings.step_source.is_fixed()) {
                accepted_alpha = *settings.step_source.fixed_alpha;
                next_value = problem.value(state.x); // trace bookkeeping, uncounted
            } else {
                accepted_alpha = search->accepted_alpha;
                if (settings.method == Method::AGD)
                    next_value = problem.value(state.x); // the trial point was the y update
                else
                    next_value = search->accepted_probe.trial_value;
            }
        }

        current_value = next_value;
        push_row(k + 1, current_value, accepted_alpha);

        if (!std::isfinite(current_value)) return finish(TerminationReason::Diverged);
        if (reference && settings.stopping.gap_target &&
            gap_of(current_value) <= *settings.stopping.gap_target)
            return finish(TerminationReason::Precision);
        if (proximal && settings.stopping.gradient_norm_target &&
            prox_residual <= *settings.stopping.gradient_norm_target)
            return finish(TerminationReason::Stationary);
    }

    return finish(TerminationReason::MaxIterations);
}

} // namespace lsopt
