#include <benchmark/benchmark.h>

#include <random>

#include "lsopt/datasets.hpp"
#include "lsopt/linesearch.hpp"
#include "lsopt/optimizers.hpp"
#include "lsopt/problems.hpp"

using namespace lsopt;

namespace {

ProblemDefinition bench_logistic() {
    static const ProblemDefinition problem = [] {
        const auto synthesis = synth_logistic(500, 20, 99);
        return logistic_objective(to_sparse_matrix(synthesis.data),
                                  labels_vector(synthesis.data), 1e-4);
    }();
    return problem;
}

Vector bench_point(Eigen::Index d) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(d);
    for (Eigen::Index i = 0; i < d; ++i) x[i] = normal(rng);
    return x;
}

void BM_BacktrackSearch(benchmark::State& state) {
    const auto problem = bench_logistic();
    const Vector x = bench_point(problem.dimension);
    const Vector g = problem.gradient(x);

    BacktrackConfig config;
    config.rho = 0.3;
    config.c = 1e-4;
    config.alpha0 = 1e3 / *problem.lipschitz_hint;
    config.mode = state.range(0) ? BacktrackMode::Adaptive : BacktrackMode::Regular;

    ArmijoContext ctx;
    ctx.base_value = problem.value(x);
    ctx.directional_derivative = -g.squaredNorm();
    ctx.trial_evaluator = [&](double alpha) { return problem.value(x - alpha * g); };

    long evals = 0;
    for (auto _ : state) {
        const auto result = backtrack_armijo(ctx, config);
        evals += result.criterion_evals;
        benchmark::DoNotOptimize(result.accepted_alpha);
    }
    state.counters["criterion_evals/call"] =
        double(evals) / double(state.iterations());
}

void BM_LogisticGradient(benchmark::State& state) {
    const auto problem = bench_logistic();
    const Vector x = bench_point(problem.dimension);
    for (auto _ : state) {
        benchmark::DoNotOptimize(problem.gradient(x));
    }
}

void BM_GramEigenvalue(benchmark::State& state) {
    const auto synthesis = synth_linear_inverse(int(state.range(0)), int(state.range(0)) * 2,
                                                5, 0.01, 13);
    for (auto _ : state) {
        benchmark::DoNotOptimize(largest_gram_eigenvalue(synthesis.A));
    }
}

} // namespace

BENCHMARK(BM_BacktrackSearch)->Arg(0)->Arg(1);
BENCHMARK(BM_LogisticGradient);
BENCHMARK(BM_GramEigenvalue)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
