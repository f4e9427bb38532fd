#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "attndec/errors.hpp"
#include "attndec/linalg.hpp"
#include "attndec/rng.hpp"
#include "attndec/types.hpp"

using namespace attndec;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

// SPD matrix with eigenvalues bounded away from zero.
Eigen::MatrixXd random_spd(Eigen::Index n, Rng& rng) {
  const Eigen::MatrixXd a = random_matrix(n, n + 2, rng);
  return a * a.transpose() / static_cast<double>(n + 2) +
         0.1 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("center removes per-channel means") {
  Rng rng(1);
  TimeSeries s = make_series(random_matrix(50, 3, rng), 30.0);
  s.data.col(1).array() += 7.5;
  const TimeSeries c = linalg::center(s);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(std::abs(c.data.col(j).mean()) < 1e-12);
    // centering is a column-wise shift, nothing else
    const double shift = s.data.col(j).mean();
    CHECK((c.data.col(j).array() - (s.data.col(j).array() - shift)).abs().maxCoeff() < 1e-12);
  }
  CHECK(c.rate == s.rate);
  CHECK(c.labels == s.labels);
}

TEST_CASE("lag_embed places channel c at offset o in column o_idx*D + c") {
  Eigen::MatrixXd d(4, 2);
  d << 1, 10, 2, 20, 3, 30, 4, 40;
  const LagSpec spec({-1, 0, 1});
  const Eigen::MatrixXd e = linalg::lag_embed(d, spec);
  REQUIRE(e.rows() == 4);
  REQUIRE(e.cols() == 6);
  // offset -1, channel 0: row t holds d(t-1, 0); t=0 out of range -> 0
  CHECK(e(0, 0) == 0.0);
  CHECK(e(1, 0) == 1.0);
  CHECK(e(3, 0) == 3.0);
  // offset 0 block is the data itself
  CHECK(e(2, 2) == 3.0);
  CHECK(e(2, 3) == 30.0);
  // offset +1, channel 1: row t holds d(t+1, 1); t=3 out of range -> 0
  CHECK(e(0, 5) == 20.0);
  CHECK(e(3, 5) == 0.0);
}

TEST_CASE("lag_embed with the trivial spec is the identity") {
  Rng rng(2);
  const Eigen::MatrixXd d = random_matrix(20, 3, rng);
  const Eigen::MatrixXd e = linalg::lag_embed(d, LagSpec({0}));
  CHECK((e - d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("covariance matches the brute-force sum") {
  Rng rng(3);
  const Eigen::MatrixXd x = random_matrix(40, 3, rng);
  const Eigen::MatrixXd y = random_matrix(40, 2, rng);
  const linalg::CovarianceSet cov = linalg::covariance(x, y, 0.0);

  Eigen::MatrixXd rxy = Eigen::MatrixXd::Zero(3, 2);
  for (Eigen::Index t = 0; t < 40; ++t) rxy += x.row(t).transpose() * y.row(t);
  rxy /= 39.0;
  CHECK((cov.r_xy - rxy).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd rxx = Eigen::MatrixXd::Zero(3, 3);
  for (Eigen::Index t = 0; t < 40; ++t) rxx += x.row(t).transpose() * x.row(t);
  rxx /= 39.0;
  CHECK((cov.r_xx - rxx).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("covariance ridge loads diagonals relative to their mean") {
  Rng rng(4);
  const Eigen::MatrixXd x = random_matrix(40, 3, rng);
  const Eigen::MatrixXd y = random_matrix(40, 2, rng);
  const linalg::CovarianceSet raw = linalg::covariance(x, y, 0.0);
  const linalg::CovarianceSet loaded = linalg::covariance(x, y, 1e-3);
  const double mean_diag = raw.r_xx.diagonal().mean();
  const Eigen::MatrixXd expect =
      raw.r_xx + 1e-3 * mean_diag * Eigen::MatrixXd::Identity(3, 3);
  CHECK((loaded.r_xx - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((loaded.r_xy - raw.r_xy).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sym_gevd matches the explicit-inverse eigensolver") {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform_int(6));
    const Eigen::MatrixXd a = random_spd(n, rng);
    const Eigen::MatrixXd b = random_spd(n, rng);
    const int k = static_cast<int>(n);
    const linalg::Gevd g = linalg::sym_gevd(a, b, k);

    // oracle: eigenvalues of B^{-1} A, sorted descending
    Eigen::EigenSolver<Eigen::MatrixXd> es(b.inverse() * a);
    std::vector<double> ev(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = es.eigenvalues()(i).real();
    std::sort(ev.begin(), ev.end(), std::greater<>());
    for (int i = 0; i < k; ++i) CHECK(g.values(i) == doctest::Approx(ev[static_cast<size_t>(i)]).epsilon(1e-8));

    // descending order
    for (int i = 1; i < k; ++i) CHECK(g.values(i) <= g.values(i - 1) + 1e-12);

    // residual and B-orthonormality
    const Eigen::MatrixXd resid = a * g.vectors - b * g.vectors * g.values.asDiagonal();
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-8 * a.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd gram = g.vectors.transpose() * b * g.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("sym_gevd rejects an indefinite B and names it") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd b(2, 2);
  b << 1, 0, 0, -1;
  CHECK_THROWS_AS(linalg::sym_gevd(a, b, 1, "R_yy"), numeric_degeneracy);
  try {
    linalg::sym_gevd(a, b, 1, "R_yy");
  } catch (const numeric_degeneracy& e) {
    CHECK(std::string(e.what()).find("R_yy") != std::string::npos);
  }
}

TEST_CASE("pearson hand values and the zero-variance rule") {
  Eigen::VectorXd x(4), y(4);
  x << 1, 2, 3, 4;
  y << 2, 4, 6, 8;
  CHECK(linalg::pearson(x, y) == doctest::Approx(1.0));
  y = -y;
  CHECK(linalg::pearson(x, y) == doctest::Approx(-1.0));
  Eigen::VectorXd z = Eigen::VectorXd::Constant(4, 3.0);
  CHECK(linalg::pearson(x, z) == 0.0);
  CHECK(linalg::pearson(z, z) == 0.0);

  Eigen::VectorXd u(3), v(3);
  u << 0, 1, 2;
  v << 1, 0, 1;  // corr(u, v) = 0 by symmetry
  CHECK(std::abs(linalg::pearson(u, v)) < 1e-12);
}

TEST_CASE("regress_out leaves residuals orthogonal to the confounds") {
  Rng rng(6);
  const Eigen::MatrixXd x = random_matrix(60, 4, rng);
  const Eigen::MatrixXd c = random_matrix(60, 3, rng);
  const Eigen::MatrixXd r = linalg::regress_out(x, c);
  const double scale = x.cwiseAbs().maxCoeff() * c.cwiseAbs().maxCoeff();
  CHECK((c.transpose() * r).cwiseAbs().maxCoeff() < 1e-8 * scale);
  // idempotent
  const Eigen::MatrixXd r2 = linalg::regress_out(r, c);
  CHECK((r2 - r).cwiseAbs().maxCoeff() < 1e-9 * x.cwiseAbs().maxCoeff());
}

TEST_CASE("regress_out handles rank-deficient and all-zero confounds") {
  Rng rng(7);
  const Eigen::MatrixXd x = random_matrix(30, 2, rng);
  Eigen::MatrixXd c(30, 2);
  c.col(0) = random_matrix(30, 1, rng);
  c.col(1) = 2.0 * c.col(0);  // rank 1
  const Eigen::MatrixXd r = linalg::regress_out(x, c);
  CHECK((c.transpose() * r).cwiseAbs().maxCoeff() < 1e-8 * x.cwiseAbs().maxCoeff() * c.cwiseAbs().maxCoeff());

  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(30, 2);
  const Eigen::MatrixXd rz = linalg::regress_out(x, zeros);
  CHECK((rz - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pinv_psd satisfies the Moore-Penrose identities on a singular input") {
  Rng rng(8);
  const Eigen::MatrixXd u = random_matrix(5, 2, rng);
  const Eigen::MatrixXd m = u * u.transpose();  // rank 2
  const Eigen::MatrixXd p = linalg::pinv_psd(m);
  CHECK((m * p * m - m).cwiseAbs().maxCoeff() < 1e-9 * m.cwiseAbs().maxCoeff());
  CHECK((p * m * p - p).cwiseAbs().maxCoeff() < 1e-9 * p.cwiseAbs().maxCoeff());
  CHECK((m * p - (m * p).transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("mask_lag_rows keeps exactly the rows whose whole window is kept") {
  const Eigen::Index t = 12;
  std::vector<bool> keep(static_cast<size_t>(t), true);
  keep[4] = keep[5] = false;
  const LagSpec spec({-1, 0, 1});
  const std::vector<Eigen::Index> rows = linalg::mask_lag_rows(keep, spec);

  for (Eigen::Index r = 0; r < t; ++r) {
    bool expect = true;
    for (int o : spec.offsets) {
      const Eigen::Index p = r + o;
      if (p >= 0 && p < t && !keep[static_cast<size_t>(p)]) expect = false;
    }
    const bool got = std::find(rows.begin(), rows.end(), r) != rows.end();
    CHECK(got == expect);
  }
}

TEST_CASE("select_rows gathers in order") {
  Eigen::MatrixXd m(4, 2);
  m << 1, 2, 3, 4, 5, 6, 7, 8;
  const Eigen::MatrixXd s = linalg::select_rows(m, {3, 0});
  REQUIRE(s.rows() == 2);
  CHECK(s(0, 0) == 7.0);
  CHECK(s(1, 1) == 2.0);
}
