#include <benchmark/benchmark.h>

#include <cmath>

#include "obskernel/canonical.hpp"
#include "obskernel/control.hpp"
#include "obskernel/funalg.hpp"
#include "obskernel/perturb.hpp"
#include "obskernel/syntax.hpp"

using namespace obskernel;

static void BM_Parse(benchmark::State& state) {
  const std::string text = "f[x_, y_] /; Element[x, Cst] -> star(eps, x*y) + delta(eps, g[y])^2";
  for (auto _ : state) benchmark::DoNotOptimize(parse(text));
}
BENCHMARK(BM_Parse);

static void BM_Canonicalize(benchmark::State& state) {
  // Nested sums of products; width controls the number of summands.
  Expr e = num(0);
  for (int i = 0; i < state.range(0); ++i)
    e = plus({e, times({sym(i % 2 ? "x" : "y"), num(i)}), power(sym("z"), num(i % 3))});
  for (auto _ : state) benchmark::DoNotOptimize(canonicalize(e));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Canonicalize)->RangeMultiplier(4)->Range(4, 256)->Complexity();

static void BM_ProductRule(benchmark::State& state) {
  Session s;
  s.install(funalgPack());
  s.install(perturbPack());
  for (auto _ : state) benchmark::DoNotOptimize(checkProductRule(s, sym("y"), sym("x"), sym("eps")).holds);
}
BENCHMARK(BM_ProductRule);

static void BM_Dichotomy(benchmark::State& state) {
  auto f = [](double x) { return x * x * x - x - 2; };
  for (auto _ : state) benchmark::DoNotOptimize(dichotomy(f, 1, 2, 1e-10).root);
}
BENCHMARK(BM_Dichotomy);

static void BM_EvaluateDepth(benchmark::State& state) {
  Session s;
  Expr e = parse("Depth[x[y,z[1,2]]]");
  for (auto _ : state) benchmark::DoNotOptimize(s.evaluate(e));
}
BENCHMARK(BM_EvaluateDepth);
BENCHMARK_MAIN();
