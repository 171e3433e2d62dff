#pragma once

#include <stdexcept>
#include <string>

namespace lsopt {

/// The search direction does not point downhill (inner product with the
/// gradient is nonnegative), so no Armijo step can exist.
struct NonDescentDirection : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A violation value outside (0, 1) was handed to an adaptive factor rule
/// that has no meaningful answer for it.
struct InvalidViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidStrongConvexity : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Asked for a proximal step on an objective that has no registered prox.
struct NoProxAvailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RankOutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An iterative estimate (power iteration) failed to stabilize within its cap.
struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input data; carries the 1-based line number of the offender.
struct ParseError : std::runtime_error {
    ParseError(int line_number, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
          line(line_number) {}
    int line;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lsopt
