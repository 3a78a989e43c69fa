#include <benchmark/benchmark.h>

#include "finpart/cutoff.hpp"
#include "finpart/mellin.hpp"
#include "finpart/multi.hpp"
#include "finpart/random.hpp"
#include "finpart/residue.hpp"

using namespace finpart;

namespace {

SingularForm random_top(int n, int m, int N, std::uint64_t seed) {
  ProblemGenerator gen(seed);
  return gen.top_form(Layout::single(n, m), N, 2);
}

void BM_WindowMellin(benchmark::State& state) {
  const WindowMellin W(std::vector<Window>{Window()});
  double sigma = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(W(Complex(sigma, 0.7)));
    sigma += 1e-9;
  }
}
BENCHMARK(BM_WindowMellin);

void BM_SphereMoment(benchmark::State& state) {
  const std::vector<int> gamma{4, 2, 6, 0};
  for (auto _ : state) benchmark::DoNotOptimize(sphere_moment(gamma));
}
BENCHMARK(BM_SphereMoment);

void BM_ExteriorDerivative(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ProblemGenerator gen(11);
  const SingularForm w = gen.singular_form(Layout::single(n, 2), 2, n - 1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(exterior_derivative(w));
}
BENCHMARK(BM_ExteriorDerivative)->Arg(3)->Arg(4)->Arg(6);

void BM_MellinExpansion(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SingularForm w = random_top(n, 2, 2, 12);
  const auto mu0 = MorseBott::standard(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(expansion(w, mu0));
}
BENCHMARK(BM_MellinExpansion)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_ConformalZeta(benchmark::State& state) {
  const SingularForm w = random_top(3, 2, 2, 13);
  ProblemGenerator gen(14);
  const ZetaEvaluator z(w, MorseBott(2, gen.phi(3, 2)));
  double re = 0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(z.evaluate(Complex(re, 0.3)));
    re += 1e-9;
  }
}
BENCHMARK(BM_ConformalZeta)->Unit(benchmark::kMicrosecond);

void BM_CutoffIntegral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SingularForm w = random_top(n, 2, 1, 15);
  const auto mu0 = MorseBott::standard(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(cutoff_integral(w, mu0, 0.05));
}
BENCHMARK(BM_CutoffIntegral)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_CutoffExpansion(benchmark::State& state) {
  const SingularForm w = random_top(3, 2, 2, 16);
  ProblemGenerator gen(17);
  const MorseBott mu(2, gen.phi(3, 2));
  for (auto _ : state) benchmark::DoNotOptimize(cutoff_expansion(w, mu));
}
BENCHMARK(BM_CutoffExpansion)->Unit(benchmark::kMillisecond);

void BM_ResidueMap(benchmark::State& state) {
  ProblemGenerator gen(18);
  const SingularForm w = gen.tame_form(4, 2, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(residue_map(w));
}
BENCHMARK(BM_ResidueMap)->Unit(benchmark::kMicrosecond);

void BM_MultiExpansion(benchmark::State& state) {
  ProblemGenerator gen(19);
  const Layout L(4, {Block{0, 2}, Block{2, 2}});
  const std::vector<int> all{0, 1, 2, 3};
  Form num(L);
  num.add_term(frame_of(all), ProblemGenerator::support_windows(L),
               Polynomial::constant(4, 1.0) + gen.polynomial(4, 2, 3));
  const CrossingProblem p(SingularForm(std::vector<int>{1, 1}, num));
  for (auto _ : state) benchmark::DoNotOptimize(multi_expansion(p));
}
BENCHMARK(BM_MultiExpansion)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
