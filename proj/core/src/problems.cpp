#include "lsopt/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace lsopt {

namespace {

// softplus(z) = log(1 + exp(z)), evaluated without overflow.
inline auto softplus(const Eigen::ArrayXd& z) {
    return z.max(0.0) + (-z.abs()).exp().log1p();
}

// sigma(z) = 1/(1 + exp(-z)) via exp(-|z|) only.
inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) {
    const Eigen::ArrayXd e = (-z.abs()).exp();
    return (z >= 0.0).select(1.0 / (1.0 + e), e / (1.0 + e));
}

template <typename MatrixType>
double power_iteration_gram(const MatrixType& A) {
    const Eigen::Index d = A.cols();
    if (A.rows() == 0 || d == 0 || A.squaredNorm() == 0.0)
        throw std::invalid_argument("matrix must be nonzero");

    constexpr double rel_tol = 1e-8;
    constexpr int max_iterations = 10000;
    constexpr int max_restarts = 4;

    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int restart = 0; restart < max_restarts; ++restart) {
        Vector v(d);
        for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
        v.normalize();

        double lambda = 0.0;
        for (int it = 0; it < max_iterations; ++it) {
            Vector w = A.transpose() * (A * v);
            const double next = v.dot(w); // Rayleigh quotient, ||v|| = 1
            const double norm = w.norm();
            if (norm == 0.0) break; // v fell in the nullspace; restart
            v = w / norm;
            if (it > 0 && std::abs(next - lambda) <= rel_tol * std::max(std::abs(next), 1e-300))
                return next;
            lambda = next;
        }
        if (lambda > 0.0 && restart + 1 == max_restarts) break;
    }
    throw ConvergenceFailure("power iteration did not stabilize");
}

template <typename MatrixType>
ProblemDefinition logistic_impl(const MatrixType& A, const Vector& labels, double gamma) {
    const Eigen::Index n = A.rows();
    const Eigen::Index d = A.cols();
    if (labels.size() != n) throw DimensionMismatch("label count must match row count");
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
    for (Eigen::Index i = 0; i < n; ++i)
        if (labels[i] != 0.0 && labels[i] != 1.0)
            throw std::invalid_argument("labels must be 0 or 1");

    ProblemDefinition p;
    p.dimension = d;
    p.value = [A, labels, gamma, n, d](const Vector& x) {
        if (x.size() != d) throw DimensionMismatch("point has wrong dimension");
        const Eigen::ArrayXd z = (A * x).array();
        const double loss = (softplus(z) - labels.array() * z).sum() / double(n);
        return loss + 0.5 * gamma * x.squaredNorm();
    };
    p.smooth_value = p.value;
    p.gradient = [A, labels, gamma, n, d](const Vector& x) {
        if (x.size() != d) throw DimensionMismatch("point has wrong dimension");
        const Eigen::ArrayXd z = (A * x).array();
        const Vector residual = (sigmoid(z) - labels.array()).matrix();
        Vector g = A.transpose() * residual / double(n);
        if (gamma != 0.0) g += gamma * x;
        return g;
    };
    p.lipschitz_hint = lipschitz_bound(A, n);
    p.strong_convexity_hint = gamma;
    return p;
}

} // namespace

Vector soft_threshold(const Vector& z, double t) {
    return z.array().sign() * (z.array().abs() - t).max(0.0);
}

double largest_gram_eigenvalue(const Matrix& A) { return power_iteration_gram(A); }
double largest_gram_eigenvalue(const SparseMatrix& A) { return power_iteration_gram(A); }

double lipschitz_bound(const Matrix& A, Eigen::Index n) {
    return largest_gram_eigenvalue(A) / (4.0 * double(n));
}
double lipschitz_bound(const SparseMatrix& A, Eigen::Index n) {
    return largest_gram_eigenvalue(A) / (4.0 * double(n));
}

ProblemDefinition logistic_objective(const Matrix& A, const Vector& labels, double gamma) {
    return logistic_impl(A, labels, gamma);
}
ProblemDefinition logistic_objective(const SparseMatrix& A, const Vector& labels, double gamma) {
    return logistic_impl(A, labels, gamma);
}

ProblemDefinition lasso_objective(const Matrix& A, const Vector& y, double lambda) {
    if (y.size() != A.rows()) throw DimensionMismatch("y must match row count");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const Eigen::Index d = A.cols();

    ProblemDefinition p;
    p.dimension = d;
    p.smooth_value = [A, y, d](const Vector& x) {
        if (x.size() != d) throw DimensionMismatch("point has wrong dimension");
        return 0.5 * (A * x - y).squaredNorm();
    };
    p.value = [smooth = p.smooth_value, lambda](const Vector& x) {
        return smooth(x) + lambda * x.lpNorm<1>();
    };
    p.gradient = [A, y, d](const Vector& x) {
        if (x.size() != d) throw DimensionMismatch("point has wrong dimension");
        return Vector(A.transpose() * (A * x - y));
    };
    NonsmoothPart psi;
    psi.value = [lambda](const Vector& x) { return lambda * x.lpNorm<1>(); };
    psi.prox = [lambda](const Vector& z, double alpha) {
        return soft_threshold(z, lambda * alpha);
    };
    p.nonsmooth = std::move(psi);
    p.lipschitz_hint = largest_gram_eigenvalue(A);
    return p;
}

ProblemDefinition rosenbrock_objective() {
    ProblemDefinition p;
    p.dimension = 2;
    p.value = [](const Vector& x) {
        if (x.size() != 2) throw DimensionMismatch("point must be two-dimensional");
        const double u = x[0], v = x[1];
        const double a = u - v * v;
        const double b = 1.0 - v;
        return 100.0 * a * a + b * b;
    };
    p.smooth_value = p.value;
    p.gradient = [](const Vector& x) {
        if (x.size() != 2) throw DimensionMismatch("point must be two-dimensional");
        const double u = x[0], v = x[1];
        const double a = u - v * v;
        Vector g(2);
        g[0] = 200.0 * a;
        g[1] = -400.0 * v * a - 2.0 * (1.0 - v);
        return g;
    };
    return p;
}

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                    Eigen::RowMajor>>;
using RowMajorMutableMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                    Eigen::RowMajor>>;

} // namespace

ProblemDefinition matrix_factorization_objective(const Matrix& A, int rank) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (rank < 1 || rank >= std::min(m, n))
        throw RankOutOfRange("rank must satisfy 1 <= rank < min(m, n)");
    const Eigen::Index dim = (m + n) * rank;

    ProblemDefinition p;
    p.dimension = dim;
    p.value = [A, m, n, rank, dim](const Vector& x) {
        if (x.size() != dim) throw DimensionMismatch("point has wrong dimension");
        RowMajorMap U(x.data(), m, rank);
        RowMajorMap V(x.data() + m * rank, n, rank);
        return 0.5 * (U * V.transpose() - A).squaredNorm();
    };
    p.smooth_value = p.value;
    p.gradient = [A, m, n, rank, dim](const Vector& x) {
        if (x.size() != dim) throw DimensionMismatch("point has wrong dimension");
        RowMajorMap U(x.data(), m, rank);
        RowMajorMap V(x.data() + m * rank, n, rank);
        const Matrix residual = U * V.transpose() - A;
        Vector g(dim);
        RowMajorMutableMap(g.data(), m, rank) = residual * V;
        RowMajorMutableMap(g.data() + m * rank, n, rank) = residual.transpose() * U;
        return g;
    };
    return p;
}

Vector matrix_factorization_init(Eigen::Index m, Eigen::Index n, int rank, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0 / std::sqrt(double(rank)));
    Vector x((m + n) * rank);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform(rng);
    return x;
}

std::pair<ProblemDefinition, ProblemDefinition> example_objectives() {
    ProblemDefinition quadratic;
    quadratic.dimension = 1;
    quadratic.value = [](const Vector& x) { return x[0] * x[0]; };
    quadratic.smooth_value = quadratic.value;
    quadratic.gradient = [](const Vector& x) {
        Vector g(1);
        g[0] = 2.0 * x[0];
        return g;
    };
    quadratic.lipschitz_hint = 2.0;

    // cos(x) - a*x with a = 1/(5*pi); its slope oscillates around -a.
    const double a = 1.0 / (5.0 * std::numbers::pi);
    ProblemDefinition oscillatory;
    oscillatory.dimension = 1;
    oscillatory.value = [a](const Vector& x) { return std::cos(x[0]) - a * x[0]; };
    oscillatory.smooth_value = oscillatory.value;
    oscillatory.gradient = [a](const Vector& x) {
        Vector g(1);
        g[0] = -std::sin(x[0]) - a;
        return g;
    };
    oscillatory.lipschitz_hint = 1.0;

    return {std::move(quadratic), std::move(oscillatory)};
}

} // namespace lsopt
