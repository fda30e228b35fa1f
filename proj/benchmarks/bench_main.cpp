#include <benchmark/benchmark.h>

#include "stochtaylor/coeffs.hpp"
#include "stochtaylor/iterints.hpp"
#include "stochtaylor/mserr.hpp"
#include "stochtaylor/noise.hpp"
#include "stochtaylor/oracle.hpp"
#include "stochtaylor/schemes.hpp"

#include <algorithm>
#include <cmath>

using namespace stochtaylor;

static StepPlan bench_plan(double gamma, double delta) {
  const double c = std::max(1.0, min_c_star(gamma, {delta}, 10000, 2));
  return plan_truncation(gamma, delta, std::exp2(std::ceil(std::log2(c))), 2);
}

static void BM_BuildTable(benchmark::State& state) {
  const auto family = WeightFamily::parse(state.range(0) == 3 ? "000" : "0000");
  const int q = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_table(family, q));
}
BENCHMARK(BM_BuildTable)->Args({3, 6})->Args({3, 16})->Args({4, 6})->Unit(benchmark::kMillisecond);

static void BM_SampleBasis(benchmark::State& state) {
  RngStream rng(1, 0);
  const int j_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_basis(2, j_max, 0.01, rng));
  state.SetItemsProcessed(state.iterations() * 2 * (j_max + 1));
}
BENCHMARK(BM_SampleBasis)->Arg(8)->Arg(128)->Arg(512);

static void BM_BatchEvaluate(benchmark::State& state) {
  const double gamma = static_cast<double>(state.range(0)) / 10.0;
  const double delta = 1.0 / 16.0;
  const auto plan = bench_plan(gamma, delta);
  RngStream rng(2, 0);
  const auto basis = sample_basis(2, plan.j_max, delta, rng);
  for (auto _ : state) benchmark::DoNotOptimize(batch_evaluate(plan, basis));
  state.counters["j_max"] = plan.j_max;
}
BENCHMARK(BM_BatchEvaluate)->Arg(20)->Arg(25)->Arg(30)->Unit(benchmark::kMicrosecond);

static void BM_Step(benchmark::State& state) {
  const double gamma = static_cast<double>(state.range(0)) / 10.0;
  const double delta = 1.0 / 16.0;
  const auto model = builtin_model("linear2d");
  const SchemeSpec spec{IntegralKind::Ito, gamma, bench_plan(gamma, delta)};
  const Stepper stepper(model, spec);
  RngStream rng(3, 0);
  const auto basis = sample_basis(2, spec.plan.j_max, delta, rng);
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step(model.x0, 0, basis));
}
BENCHMARK(BM_Step)->Arg(20)->Arg(25)->Arg(30)->Unit(benchmark::kMicrosecond);

static void BM_FiniteDifferenceWord(benchmark::State& state) {
  auto model = builtin_model("linear2d");
  model.linear.reset();
  const int slots[] = {1, 2, 1, 2, 1};
  const auto word = instantiate_word("G G G G S", IntegralKind::Ito, slots);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_word(model, word, model.x0, 0.0));
}
BENCHMARK(BM_FiniteDifferenceWord)->Unit(benchmark::kMillisecond);

static void BM_IntegralSum(benchmark::State& state) {
  RngStream rng(4, 0);
  const auto path = synthesize_path(3, state.range(0), 1.0, rng);
  const MultiIndex multi{WeightFamily::parse("000"), {1, 2, 3}};
  for (auto _ : state) benchmark::DoNotOptimize(integral_sum(multi, path));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntegralSum)->Arg(1 << 10)->Arg(1 << 14);

static void BM_ProjectZeta(benchmark::State& state) {
  RngStream rng(5, 0);
  const auto path = synthesize_path(2, 1 << 14, 1.0, rng);
  const int j_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(project_zeta(path, j_max));
}
BENCHMARK(BM_ProjectZeta)->Arg(6)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_ExactError(benchmark::State& state) {
  const auto family = WeightFamily::parse("000");
  for (auto _ : state) benchmark::DoNotOptimize(exact_error(family, ComponentPattern::parse("aab", 3), 6, 1.0));
}
BENCHMARK(BM_ExactError)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
