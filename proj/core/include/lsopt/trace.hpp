#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lsopt {

/// Work tallies for one run. `objective_evals` counts the initial objective
/// evaluation plus one per criterion probe; bookkeeping evaluations done
/// only to fill the trace are excluded. All fields are monotone over a run.
struct EvalCounters {
    long objective_evals = 0;
    long gradient_evals = 0;
    long criterion_evals = 0;
    long prox_evals = 0;
};

struct TraceRow {
    int iter = 0;
    double objective = 0.0;
    double gap = 0.0; // objective minus the reference value; NaN without one
    double alpha = 0.0;
    EvalCounters counters;
    double elapsed_s = 0.0;
};

enum class TerminationReason { MaxIterations, Precision, Stationary, CapExceeded, Diverged };

const char* to_string(TerminationReason reason);
TerminationReason termination_from_string(const std::string& text);

/// Identifies the configuration that produced a trace; embedded as comment
/// lines in the CSV header.
struct RunFingerprint {
    std::string method;    // gd | agd | adagrad | fista
    std::string criterion; // armijo | descent-lemma | none
    std::string mode;      // regular | adaptive | fixed
    std::string policy;    // restarting | monotone | none
    double rho = 0.0;
    double c = 0.0;
    double epsilon = 0.0;
    double alpha0 = 0.0;
    std::uint64_t seed = 0;
};

struct RunTrace {
    RunFingerprint fingerprint;
    /// Extra `# key=value` header lines (problem name, precision, reference
    /// value, ...). Order is preserved through a CSV round trip.
    std::vector<std::pair<std::string, std::string>> annotations;
    std::vector<TraceRow> rows;
    TerminationReason termination = TerminationReason::MaxIterations;

    const std::string* annotation(const std::string& key) const;
    void annotate(std::string key, std::string value);
};

} // namespace lsopt
