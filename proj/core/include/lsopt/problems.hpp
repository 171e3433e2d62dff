#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "lsopt/errors.hpp"
#include "lsopt/types.hpp"

namespace lsopt {

/// Nonsmooth part of a composite objective: its value and, when available,
/// the proximal map prox(z, alpha) = argmin_x psi(x) + ||x - z||^2/(2 alpha).
struct NonsmoothPart {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&, double)> prox;
};

/// Objective bundle consumed by the optimizers. `value` reports the full
/// objective (smooth + nonsmooth); `gradient` and `smooth_value` report the
/// smooth part only. For purely smooth objectives the two values coincide.
struct ProblemDefinition {
    Eigen::Index dimension = 0;
    std::function<double(const Vector&)> value;
    std::function<double(const Vector&)> smooth_value;
    std::function<Vector(const Vector&)> gradient;
    std::optional<NonsmoothPart> nonsmooth;
    std::optional<double> lipschitz_hint;
    std::optional<double> strong_convexity_hint;
};

/// Componentwise soft threshold: sign(z_i) * max(|z_i| - t, 0).
Vector soft_threshold(const Vector& z, double t);

/// Largest eigenvalue of A^T A by power iteration (relative tolerance 1e-8,
/// cap 10000 iterations). Throws on a zero matrix or a stalled iteration.
double largest_gram_eigenvalue(const Matrix& A);
double largest_gram_eigenvalue(const SparseMatrix& A);

/// Standard smoothness bound for the logistic loss: lambda_max(A^T A)/(4n).
double lipschitz_bound(const Matrix& A, Eigen::Index n);
double lipschitz_bound(const SparseMatrix& A, Eigen::Index n);

/// Binary logistic regression with L2 regularization gamma/2*||x||^2.
/// Labels must be in {0,1}. The loss is evaluated in log-sum-exp form so it
/// stays finite for all finite x. Sets lipschitz_hint to the data bound and
/// strong_convexity_hint to gamma.
ProblemDefinition logistic_objective(const Matrix& A, const Vector& labels, double gamma);
ProblemDefinition logistic_objective(const SparseMatrix& A, const Vector& labels, double gamma);

/// 1/2*||Ax - y||^2 + lambda*||x||_1 with a soft-threshold prox and
/// lipschitz_hint = lambda_max(A^T A).
ProblemDefinition lasso_objective(const Matrix& A, const Vector& y, double lambda);

/// F(u, v) = 100*(u - v^2)^2 + (1 - v)^2 with its analytic gradient.
ProblemDefinition rosenbrock_objective();

/// 1/2*||U V^T - A||_F^2 over the concatenated variable (U row-major, then
/// V row-major). Throws RankOutOfRange unless 1 <= rank < min(m, n).
ProblemDefinition matrix_factorization_objective(const Matrix& A, int rank);

/// Uniform [0, 1/sqrt(rank)] starting point for the factorization variable,
/// drawn from a generator seeded with `seed`.
Vector matrix_factorization_init(Eigen::Index m, Eigen::Index n, int rank, std::uint64_t seed);

/// Two scalar test objectives used by the exact replication suites:
/// first F(x) = x^2, second F(x) = cos(x) - x/(5*pi).
std::pair<ProblemDefinition, ProblemDefinition> example_objectives();

} // namespace lsopt
