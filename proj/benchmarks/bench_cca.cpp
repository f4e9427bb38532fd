// Full model fits and segment evaluation at protocol scale: one 120 s
// 64-channel record against a univariate feature (the per-fold training cost
// is ~12 of these pooled), and the 30 s scoring step that dominates the
// bootstrap loop.
#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "attndec/cca.hpp"
#include "attndec/rng.hpp"
#include "attndec/types.hpp"

namespace {

using namespace attndec;

struct Instance {
  TimeSeries x;  // data stream
  TimeSeries y;  // feature
};

Instance make_instance(Eigen::Index t, Eigen::Index ch, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd latent(t);
  for (Eigen::Index i = 0; i < t; ++i) latent(i) = rng.normal();
  Eigen::MatrixXd xd(t, ch), yd(t, 1);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < ch; ++j) xd(i, j) = rng.normal() + 0.3 * latent(i);
  for (Eigen::Index i = 0; i < t; ++i) yd(i, 0) = latent(i) + 0.5 * rng.normal();
  return {make_series(std::move(xd), 30.0, "ch"), make_series(std::move(yd), 30.0, "feat")};
}

void bm_fit_cca(benchmark::State& state) {
  const Instance inst = make_instance(3600, state.range(0), 11);
  for (auto _ : state) {
    cca::CcaModel m = cca::fit_cca(inst.x, inst.y, cca::default_data_lags(),
                                   cca::default_stimulus_lags(), cca::kDefaultComponents);
    benchmark::DoNotOptimize(m.w_x.data());
  }
}
BENCHMARK(bm_fit_cca)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_fit_cca_segments(benchmark::State& state) {
  std::vector<TimeSeries> xs, ys;
  for (int i = 0; i < 12; ++i) {
    Instance inst = make_instance(3600, 64, 20 + static_cast<std::uint64_t>(i));
    xs.push_back(std::move(inst.x));
    ys.push_back(std::move(inst.y));
  }
  for (auto _ : state) {
    cca::CcaModel m =
        cca::fit_cca_segments(xs, ys, cca::default_data_lags(), cca::default_stimulus_lags(),
                              cca::kDefaultComponents);
    benchmark::DoNotOptimize(m.w_x.data());
  }
}
BENCHMARK(bm_fit_cca_segments)->Unit(benchmark::kMillisecond);

void bm_evaluate_segment(benchmark::State& state) {
  const Instance train = make_instance(3600, 64, 31);
  const cca::CcaModel model =
      cca::fit_cca(train.x, train.y, cca::default_data_lags(), cca::default_stimulus_lags(),
                   cca::kDefaultComponents);
  const Instance seg = make_instance(900, 64, 32);  // 30 s at 30 Hz
  for (auto _ : state) {
    std::vector<double> corrs = cca::evaluate(model, seg.x, seg.y);
    benchmark::DoNotOptimize(corrs.data());
  }
}
BENCHMARK(bm_evaluate_segment);

}  // namespace
