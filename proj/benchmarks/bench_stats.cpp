// Permutation-null construction costs: phase scrambling a full record (the
// per-surrogate cost, paid n_surrogates times per fold) and the exact
// signed-rank test at its largest enumerated size.
#include <benchmark/benchmark.h>

#include <vector>

#include "attndec/rng.hpp"
#include "attndec/stats.hpp"
#include "attndec/types.hpp"

namespace {

using namespace attndec;

TimeSeries random_series(Eigen::Index t, Eigen::Index ch, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(t, ch);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < ch; ++j) m(i, j) = rng.normal();
  return make_series(std::move(m), 30.0);
}

void bm_phase_scramble(benchmark::State& state) {
  const TimeSeries s = random_series(3600, state.range(0), 41);
  Rng rng(42);
  for (auto _ : state) {
    TimeSeries sc = stats::phase_scramble(s, rng);
    benchmark::DoNotOptimize(sc.data.data());
  }
}
BENCHMARK(bm_phase_scramble)->Arg(1)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_wilcoxon_exact(benchmark::State& state) {
  Rng rng(43);
  const int n = 20;  // largest size before the normal approximation takes over
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[static_cast<size_t>(i)] = rng.normal();
    b[static_cast<size_t>(i)] = rng.normal() + 0.3;
  }
  for (auto _ : state) {
    stats::WilcoxonResult r = stats::wilcoxon_signed_rank(a, b);
    benchmark::DoNotOptimize(r.p);
  }
}
BENCHMARK(bm_wilcoxon_exact)->Unit(benchmark::kMillisecond);

void bm_significance_threshold(benchmark::State& state) {
  Rng rng(44);
  stats::NullDistribution null;
  null.values.resize(1900);  // 19 subjects x 100 shifts
  for (double& v : null.values) v = rng.uniform();
  for (auto _ : state) {
    double thr = stats::significance_threshold(null);
    benchmark::DoNotOptimize(thr);
  }
}
BENCHMARK(bm_significance_threshold);

}  // namespace
