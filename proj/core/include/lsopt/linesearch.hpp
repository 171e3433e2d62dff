#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>

#include "lsopt/errors.hpp"
#include "lsopt/types.hpp"

namespace lsopt {

/// How the tentative step size of each line-search call is seeded.
/// Restarting uses the same alpha0 every call; Monotone carries the
/// previously accepted step forward, so the step sequence never grows.
enum class StepPolicy { Restarting, Monotone };

/// Regular shrinks by the constant rho; Adaptive shrinks by a factor
/// computed from the measured criterion violation.
enum class BacktrackMode { Regular, Adaptive };

struct BacktrackConfig {
    double rho = 0.5;        // constant shrink factor, in (0,1)
    double c = 1e-4;         // sufficient-decrease constant, in (0,1)
    double epsilon = 1e-2;   // clamp floor for the adaptive factor
    double alpha0 = 1.0;     // first tentative step of a call
    StepPolicy policy = StepPolicy::Restarting;
    BacktrackMode mode = BacktrackMode::Regular;
    int max_adjustments = 200;

    /// Throws std::invalid_argument on out-of-range parameters.
    void validate() const;
    /// Adaptive sufficient-decrease searches additionally need epsilon < rho.
    void validate_adaptive_sufficient_decrease() const;
};

/// One evaluation of a line-search criterion at a tentative step size.
/// The criterion holds at `alpha` exactly when `violation >= 1`.
struct CriterionProbe {
    double alpha = 0.0;
    double violation = -std::numeric_limits<double>::infinity();
    /// Objective value at the trial point, cached so accepting the probe
    /// costs no re-evaluation. For the quadratic-bound criterion this is
    /// the smooth part at the proximal point.
    double trial_value = std::numeric_limits<double>::quiet_NaN();
    bool feasible = false;
};

struct LineSearchResult {
    double accepted_alpha = 0.0;
    /// Number of criterion evaluations in this call, including the
    /// accepting one. Each evaluation costs one objective evaluation.
    int criterion_evals = 0;
    int adjustments = 0; // criterion_evals - 1 on success
    CriterionProbe accepted_probe;
    /// True when max_adjustments ran out before a feasible step was found;
    /// accepted_probe then holds the last (infeasible) probe.
    bool terminated_by_cap = false;
    /// Times the adaptive factor rule had no answer and the constant rho
    /// was used instead.
    int factor_fallbacks = 0;
};

/// Inputs for the sufficient-decrease criterion at a fixed base point and
/// direction. `trial_evaluator` maps alpha to the objective at x + alpha*d.
struct ArmijoContext {
    double base_value = 0.0;
    double directional_derivative = 0.0; // must be < 0
    std::function<double(double)> trial_evaluator;
};

/// Inputs for the quadratic-upper-bound criterion used by proximal methods.
/// `prox_evaluator` maps alpha to the proximal point and the smooth part of
/// the objective evaluated there.
struct DescentLemmaContext {
    Vector anchor_point;
    double smooth_value_at_anchor = 0.0;
    Vector gradient_at_anchor;
    std::function<std::pair<Vector, double>(double)> prox_evaluator;
};

/// Violation of the sufficient-decrease inequality at `alpha`:
///   v = (F(x + alpha d) - F(x)) / (c * alpha * <grad, d>).
/// Performs exactly one trial evaluation. A non-finite trial value yields
/// violation = -inf, infeasible. Throws NonDescentDirection when the
/// directional derivative is not negative.
CriterionProbe armijo_violation(const ArmijoContext& ctx, double alpha, double c);

/// Shrink factor max(epsilon, rho*(1-c)/(1-c*v)) for an infeasible probe.
/// Lies in [epsilon, rho) whenever v < 1 and epsilon < rho. Non-finite
/// violations collapse to the epsilon clamp.
double armijo_adaptive_factor(double violation, double rho, double c, double epsilon);

/// Violation of the quadratic-upper-bound inequality at `alpha`:
///   v = (1/(2 alpha)) * ||p - y||^2 / (f(p) - f(y) - <grad f(y), p - y>).
/// A nonpositive denominator means the bound already holds; the probe is
/// feasible with violation +inf. Performs one prox and one smooth-value
/// evaluation.
CriterionProbe descent_lemma_violation(const DescentLemmaContext& ctx, double alpha);

/// Shrink factor rho*v for an infeasible quadratic-bound probe. Throws
/// InvalidViolation when v is nonpositive or non-finite; callers substitute
/// the constant rho in that case.
double descent_lemma_adaptive_factor(double violation, double rho);

using CriterionFn = std::function<CriterionProbe(double)>;
using FactorFn = std::function<double(const CriterionProbe&)>;

/// Generic backtracking loop: probes config.alpha0, then multiplies the
/// tentative step by the constant rho (Regular) or by `adaptive_factor`
/// applied to the latest infeasible probe (Adaptive) until feasibility or
/// the adjustment cap. Probed step sizes are strictly decreasing. If the
/// factor rule throws InvalidViolation, rho is substituted and the fallback
/// is counted.
LineSearchResult backtrack(const CriterionFn& criterion, const BacktrackConfig& config,
                           const FactorFn& adaptive_factor = {});

/// Sufficient-decrease search over `ctx` with the violation/factor pair above.
LineSearchResult backtrack_armijo(const ArmijoContext& ctx, const BacktrackConfig& config);

struct ProxSearchResult {
    LineSearchResult search;
    /// Proximal point of the last probe (the accepted iterate on success).
    Vector accepted_point;
};

/// Quadratic-upper-bound search over `ctx`; also hands back the proximal
/// point of the accepting probe so it needs no recomputation.
ProxSearchResult backtrack_descent_lemma(const DescentLemmaContext& ctx,
                                         const BacktrackConfig& config);

/// Seed step size for one line-search call under `policy`.
double initial_step(StepPolicy policy, double alpha0, std::optional<double> previous_accepted);

} // namespace lsopt
