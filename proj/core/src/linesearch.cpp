#include "lsopt/linesearch.hpp"

#include <cmath>
#include <stdexcept>

namespace lsopt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}
} // namespace

void BacktrackConfig::validate() const {
    require(std::isfinite(rho) && rho > 0.0 && rho < 1.0, "rho must lie in (0,1)");
    require(std::isfinite(c) && c > 0.0 && c < 1.0, "c must lie in (0,1)");
    require(std::isfinite(alpha0) && alpha0 > 0.0, "alpha0 must be positive");
    require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be positive");
    require(max_adjustments >= 1, "max_adjustments must be at least 1");
}

void BacktrackConfig::validate_adaptive_sufficient_decrease() const {
    validate();
    // Required for the adaptive factor to stay strictly below rho.
    require(epsilon < rho, "epsilon must be smaller than rho in adaptive mode");
}

CriterionProbe armijo_violation(const ArmijoContext& ctx, double alpha, double c) {
    require(alpha > 0.0, "alpha must be positive");
    require(c > 0.0 && c < 1.0, "c must lie in (0,1)");
    if (!(ctx.directional_derivative < 0.0))
        throw NonDescentDirection("directional derivative must be negative");

    CriterionProbe probe;
    probe.alpha = alpha;
    probe.trial_value = ctx.trial_evaluator(alpha);
    if (!std::isfinite(probe.trial_value)) {
        probe.violation = -kInf;
        probe.feasible = false;
        return probe;
    }
    const double denom = c * alpha * ctx.directional_derivative; // < 0
    probe.violation = (probe.trial_value - ctx.base_value) / denom;
    probe.feasible = probe.violation >= 1.0;
    return probe;
}

double armijo_adaptive_factor(double violation, double rho, double c, double epsilon) {
    if (!std::isfinite(violation)) return epsilon;
    const double raw = rho * (1.0 - c) / (1.0 - c * violation);
    return std::max(epsilon, raw);
}

CriterionProbe descent_lemma_violation(const DescentLemmaContext& ctx, double alpha) {
    require(alpha > 0.0, "alpha must be positive");

    auto [point, smooth_value] = ctx.prox_evaluator(alpha);
    CriterionProbe probe;
    probe.alpha = alpha;
    probe.trial_value = smooth_value;
    if (!std::isfinite(smooth_value)) {
        probe.violation = -kInf;
        probe.feasible = false;
        return probe;
    }

    const Vector diff = point - ctx.anchor_point;
    const double model_gap = smooth_value - ctx.smooth_value_at_anchor -
                             ctx.gradient_at_anchor.dot(diff);
    if (!(model_gap > 0.0)) {
        // The quadratic model already upper-bounds the smooth part.
        probe.violation = kInf;
        probe.feasible = true;
        return probe;
    }
    probe.violation = diff.squaredNorm() / (2.0 * alpha) / model_gap;
    probe.feasible = probe.violation >= 1.0;
    return probe;
}

double descent_lemma_adaptive_factor(double violation, double rho) {
    if (!std::isfinite(violation) || violation <= 0.0)
        throw InvalidViolation("violation must lie in (0,1)");
    return rho * violation;
}

LineSearchResult backtrack(const CriterionFn& criterion, const BacktrackConfig& config,
                           const FactorFn& adaptive_factor) {
    config.validate();

    LineSearchResult result;
    double alpha = config.alpha0;
    CriterionProbe probe = criterion(alpha);
    result.criterion_evals = 1;

    while (!probe.feasible) {
        if (result.adjustments >= config.max_adjustments) {
            result.accepted_alpha = probe.alpha;
            result.accepted_probe = probe;
            result.terminated_by_cap = true;
            return result;
        }
        double factor = config.rho;
        if (config.mode == BacktrackMode::Adaptive && adaptive_factor) {
            try {
                factor = adaptive_factor(probe);
            } catch (const InvalidViolation&) {
                factor = config.rho;
                ++result.factor_fallbacks;
            }
            // keep the probed sequence strictly decreasing whatever the rule returns
            if (!(factor > 0.0 && factor < 1.0)) {
                factor = config.rho;
                ++result.factor_fallbacks;
            }
        }
        alpha *= factor;
        probe = criterion(alpha);
        ++result.criterion_evals;
        ++result.adjustments;
    }

    result.accepted_alpha = probe.alpha;
    result.accepted_probe = probe;
    return result;
}

LineSearchResult backtrack_armijo(const ArmijoContext& ctx, const BacktrackConfig& config) {
    if (config.mode == BacktrackMode::Adaptive)
        config.validate_adaptive_sufficient_decrease();
    auto criterion = [&](double alpha) { return armijo_violation(ctx, alpha, config.c); };
    auto factor = [&](const CriterionProbe& probe) {
        return armijo_adaptive_factor(probe.violation, config.rho, config.c, config.epsilon);
    };
    return backtrack(criterion, config, factor);
}

ProxSearchResult backtrack_descent_lemma(const DescentLemmaContext& ctx,
                                         const BacktrackConfig& config) {
    ProxSearchResult out;
    DescentLemmaContext probed = ctx;
    probed.prox_evaluator = [&](double alpha) {
        auto pair = ctx.prox_evaluator(alpha);
        out.accepted_point = pair.first;
        return pair;
    };
    auto criterion = [&](double alpha) { return descent_lemma_violation(probed, alpha); };
    auto factor = [&](const CriterionProbe& probe) {
        return descent_lemma_adaptive_factor(probe.violation, config.rho);
    };
    out.search = backtrack(criterion, config, factor);
    return out;
}

double initial_step(StepPolicy policy, double alpha0, std::optional<double> previous_accepted) {
    require(alpha0 > 0.0, "alpha0 must be positive");
    if (policy == StepPolicy::Monotone && previous_accepted.has_value())
        return *previous_accepted;
    return alpha0;
}

} // namespace lsopt
