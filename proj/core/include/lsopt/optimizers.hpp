#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "lsopt/linesearch.hpp"
#include "lsopt/problems.hpp"
#include "lsopt/trace.hpp"
#include "lsopt/types.hpp"

namespace lsopt {

enum class Method { GD, AGD, Adagrad, FISTA };

enum class CriterionKind { Armijo, DescentLemma };

/// Which pair of iterates the momentum extrapolation combines: the freshly
/// produced iterate and its predecessor (the classical indexing), or the two
/// iterates that were current before the proximal step (one step stale).
enum class FistaAnchor { FreshIterate, Lagged };

/// Where step sizes come from: a constant, or a backtracking search with the
/// given criterion.
struct StepSource {
    std::optional<double> fixed_alpha;
    BacktrackConfig search;
    CriterionKind criterion = CriterionKind::Armijo;

    static StepSource fixed(double alpha);
    static StepSource line_search(const BacktrackConfig& config, CriterionKind kind);
    bool is_fixed() const { return fixed_alpha.has_value(); }
};

/// Mutable per-run quantities. `previous_alpha` carries the last accepted
/// step size between iterations (the monotone seed and, for AGD, the inverse
/// smoothness estimate).
struct OptimizerState {
    Vector x;
    Vector y;      // extrapolation point (AGD, FISTA)
    Vector x_prev; // FISTA momentum
    Vector accumulator; // Adagrad, elementwise nondecreasing
    double t = 1.0;     // FISTA momentum scalar
    std::optional<double> previous_alpha;
    long l_estimate_clamps = 0; // times AGD clamped its estimate up to m
};

/// Proximal point p_alpha(y) = argmin_x psi(x) + ||x - (y - alpha g)||^2/(2 alpha)
/// where g is the smooth gradient at y. Without a nonsmooth part this is the
/// plain gradient step. Throws NoProxAvailable when psi has no prox.
Vector prox_point(const Vector& y, double alpha, const Vector& smooth_gradient,
                  const ProblemDefinition& problem);

/// Momentum coefficient (sqrt(L) - sqrt(m)) / (sqrt(L) + sqrt(m)).
/// Throws InvalidStrongConvexity unless 0 < m <= L.
double agd_momentum_coefficient(double L_estimate, double m);

/// Next FISTA momentum scalar (1 + sqrt(1 + 4 t^2)) / 2.
double fista_next_t(double t);

/// Shared per-iteration inputs for the step operations.
struct StepContext {
    const ProblemDefinition& problem;
    double value_at_x;       // objective at the current iterate
    EvalCounters& counters;
};

/// x <- x - alpha * gradient, with alpha resolved from `source` (the search
/// direction is the negative gradient). Returns the search result when a
/// line search ran.
std::optional<LineSearchResult> gd_step(OptimizerState& state, const Vector& gradient,
                                        const StepSource& source, const StepContext& ctx);

/// One accelerated step: resolves alpha along the negative gradient, sets
/// y+ = x - alpha g, recovers L = 1/alpha, and extrapolates
/// x <- (1 + beta) y+ - beta y. Estimates below m are clamped up to m and
/// counted in state.l_estimate_clamps.
std::optional<LineSearchResult> agd_step(OptimizerState& state, const Vector& gradient,
                                         double m, const StepSource& source,
                                         const StepContext& ctx);

/// Accumulates squared gradients and steps along the preconditioned
/// direction d_i = -g_i / sqrt(s_i); a line search probes this direction, so
/// one probe costs one objective evaluation. Coordinates with zero
/// accumulator (hence zero gradient) are left unchanged.
std::optional<LineSearchResult> adagrad_step(OptimizerState& state, const Vector& gradient,
                                             const StepSource& source, const StepContext& ctx);

struct FistaStepOutcome {
    std::optional<LineSearchResult> search;
    double smooth_value_at_x; // smooth part at the fresh iterate (cached)
    double accepted_alpha;
    double prox_residual_norm; // ||p - y|| / alpha, the stationarity measure
};

/// One proximal-accelerated step from the extrapolation point y: accepts a
/// step via the quadratic-bound criterion (or uses the fixed alpha), sets
/// x <- p_alpha(y), advances t, and extrapolates y per `anchor`.
FistaStepOutcome fista_step(OptimizerState& state, const Vector& gradient_at_y,
                            double smooth_value_at_y, const StepSource& source,
                            FistaAnchor anchor, const StepContext& ctx);

struct StoppingRule {
    int max_iterations = 1000;
    std::optional<double> gap_target;         // needs reference_value
    std::optional<double> gradient_norm_target;
    std::optional<double> reference_value;    // value the gap is measured against
};

struct RunSettings {
    Method method = Method::GD;
    StepSource step_source;
    StoppingRule stopping;
    Vector x0;
    double agd_m = 0.0; // 0 -> use the problem's strong convexity hint
    FistaAnchor fista_anchor = FistaAnchor::FreshIterate;
    std::uint64_t seed = 0; // recorded in the trace fingerprint
};

/// Drives the chosen method until a stopping rule fires. Emits one trace row
/// per iteration plus the initial row, evaluates exactly one gradient per
/// iteration, and surfaces line-search cap overruns and non-finite
/// objectives as terminations with the partial trace intact.
RunTrace run(const ProblemDefinition& problem, const RunSettings& settings,
             const std::function<void(const TraceRow&)>& row_sink = {});

} // namespace lsopt
