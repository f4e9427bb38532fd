// Hot numerical kernels: lag embedding, pooled covariance, and the
// generalized symmetric eigensolver at the sizes the decoding protocol hits
// (a 64-channel stream with 3 lags embeds to 192 columns; a 19-view group
// stack with 5 lags reaches ~6k columns, benchmarked here at 960).
#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "attndec/linalg.hpp"
#include "attndec/rng.hpp"
#include "attndec/types.hpp"

namespace {

using namespace attndec;

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::MatrixXd random_spd(Eigen::Index n, std::uint64_t seed) {
  const Eigen::MatrixXd r = random_matrix(n, n, seed);
  return r.transpose() * r / static_cast<double>(n) +
         0.05 * Eigen::MatrixXd::Identity(n, n);
}

void bm_lag_embed(benchmark::State& state) {
  const Eigen::Index t = 3600;  // 120 s at 30 Hz
  const Eigen::Index ch = state.range(0);
  const TimeSeries s = make_series(random_matrix(t, ch, 1), 30.0);
  const LagSpec lags({-1, 0, 1});
  for (auto _ : state) {
    Eigen::MatrixXd e = linalg::lag_embed(s, lags);
    benchmark::DoNotOptimize(e.data());
  }
}
BENCHMARK(bm_lag_embed)->Arg(8)->Arg(64);

void bm_covariance(benchmark::State& state) {
  const Eigen::Index t = 3600;
  const Eigen::MatrixXd x = random_matrix(t, state.range(0), 2);
  const Eigen::MatrixXd y = random_matrix(t, 15, 3);
  for (auto _ : state) {
    linalg::CovarianceSet c = linalg::covariance(x, y);
    benchmark::DoNotOptimize(c.r_xx.data());
  }
}
BENCHMARK(bm_covariance)->Arg(24)->Arg(192);

void bm_sym_gevd(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd a = random_spd(n, 4);
  const Eigen::MatrixXd b = random_spd(n, 5);
  for (auto _ : state) {
    linalg::Gevd g = linalg::sym_gevd(a, b, 5);
    benchmark::DoNotOptimize(g.vectors.data());
  }
}
BENCHMARK(bm_sym_gevd)->Arg(32)->Arg(192)->Arg(960)->Unit(benchmark::kMillisecond);

void bm_regress_out(benchmark::State& state) {
  const Eigen::Index t = 3600;
  const Eigen::MatrixXd x = random_matrix(t, 192, 6);
  const Eigen::MatrixXd c = random_matrix(t, 6, 7);
  for (auto _ : state) {
    Eigen::MatrixXd r = linalg::regress_out(x, c);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(bm_regress_out)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
