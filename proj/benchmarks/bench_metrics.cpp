#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "ltr/metrics.hpp"
#include "ltr/rng.hpp"

namespace {

std::vector<int> random_grades(std::size_t n) {
  ltr::Rng rng(17);
  std::vector<int> grades(n);
  for (int& g : grades) g = static_cast<int>(rng.uniform_int(5));
  return grades;
}

void bm_dcg_at_k(benchmark::State& state) {
  std::vector<int> grades = random_grades(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ltr::dcg_at_k(grades, 10));
}
BENCHMARK(bm_dcg_at_k)->Arg(10)->Arg(100)->Arg(1000);

void bm_ndcg_at_k(benchmark::State& state) {
  std::vector<int> grades = random_grades(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ltr::ndcg_at_k(grades, 10));
}
BENCHMARK(bm_ndcg_at_k)->Arg(10)->Arg(100)->Arg(1000);

// n = 16 exercises the exact enumeration branch, n = 200 the normal
// approximation.
void bm_wilcoxon_signed_rank(benchmark::State& state) {
  ltr::Rng rng(29);
  std::vector<std::pair<double, double>> paired(
      static_cast<std::size_t>(state.range(0)));
  for (auto& [a, b] : paired) {
    a = rng.uniform();
    b = rng.uniform();
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(ltr::wilcoxon_signed_rank(paired));
}
BENCHMARK(bm_wilcoxon_signed_rank)->Arg(16)->Arg(200);

}  // namespace
