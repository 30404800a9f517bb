#include <varcomp/estimator.hpp>
#include <varcomp/existence.hpp>
#include <varcomp/likelihood.hpp>
#include <varcomp/spectral.hpp>

#include <benchmark/benchmark.h>

using namespace varcomp;

namespace {

Matrix indicator(Eigen::Index levels, Eigen::Index n)
{
    Matrix z = Matrix::Zero(n, levels);
    for (Eigen::Index i = 0; i < n; ++i) {
        z(i, i % levels) = 1.0;
    }
    return z;
}

/// Crossed two-factor layout with n = state.range(0) observations.
struct Problem {
    VarCompModel model;
    Vector y;
};

Problem problem(Eigen::Index n)
{
    Matrix x(n, 2);
    x.col(0).setOnes();
    x.col(1) = Vector::LinSpaced(n, -1.0, 1.0);
    auto model = build_model(x, {indicator(n / 4, n), indicator(3, n)});
    SigmaParams truth{Vector::Constant(2, 1.0), Vector::Constant(3, 1.0)};
    truth.sigma2(1) = 2.0;
    Vector y = simulate(model, truth, 17);
    return {std::move(model), std::move(y)};
}

void BM_ProfiledMl(benchmark::State& state)
{
    const auto p = problem(state.range(0));
    const Vector kappa = Vector::Constant(2, 0.7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(profiled_criterion(p.model, kappa, p.y));
    }
}
BENCHMARK(BM_ProfiledMl)->RangeMultiplier(2)->Range(16, 256);

void BM_ProfiledReml(benchmark::State& state)
{
    const auto p = problem(state.range(0));
    const auto basis = reml_contrast_matrix(p.model.x());
    const Vector kappa = Vector::Constant(2, 0.7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reml_profiled_criterion(p.model, kappa, p.y, basis));
    }
}
BENCHMARK(BM_ProfiledReml)->RangeMultiplier(2)->Range(16, 256);

void BM_MlExists(benchmark::State& state)
{
    const auto p = problem(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ml_exists(p.model, p.y));
    }
}
BENCHMARK(BM_MlExists)->RangeMultiplier(2)->Range(16, 256);

void BM_Decomposition(benchmark::State& state)
{
    const auto p = problem(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(scaled_cov_decomposition(p.model));
    }
}
BENCHMARK(BM_Decomposition)->RangeMultiplier(2)->Range(16, 256);

void BM_FitMl(benchmark::State& state)
{
    const auto p = problem(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_ml(p.model, p.y));
    }
}
BENCHMARK(BM_FitMl)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

void BM_FitReml(benchmark::State& state)
{
    const auto p = problem(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_reml(p.model, p.y));
    }
}
BENCHMARK(BM_FitReml)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
