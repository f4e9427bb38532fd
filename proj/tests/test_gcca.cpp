#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "attndec/cca.hpp"
#include "attndec/errors.hpp"
#include "attndec/gcca.hpp"
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

// N views sharing one latent, each with its own mixing and noise.
std::vector<TimeSeries> shared_latent_views(int n_views, Eigen::Index t, Eigen::Index d,
                                            double noise, Rng& rng) {
  const Eigen::VectorXd latent = random_matrix(t, 1, rng);
  std::vector<TimeSeries> views;
  views.reserve(static_cast<size_t>(n_views));
  for (int v = 0; v < n_views; ++v) {
    Eigen::MatrixXd m = noise * random_matrix(t, d, rng);
    const Eigen::VectorXd mix = random_matrix(d, 1, rng);
    m += latent * mix.transpose();
    views.push_back(make_series(std::move(m), 30.0, "v"));
  }
  return views;
}

double mean_pairwise_pearson(const std::vector<Eigen::VectorXd>& cols) {
  double acc = 0.0;
  int n = 0;
  for (size_t i = 0; i < cols.size(); ++i) {
    for (size_t j = i + 1; j < cols.size(); ++j) {
      acc += linalg::pearson(cols[i], cols[j]);
      ++n;
    }
  }
  return acc / n;
}

}  // namespace

TEST_CASE("default view lags are five centered offsets") {
  const LagSpec lag = gcca::default_view_lags();
  CHECK(lag.offsets == std::vector<int>({-2, -1, 0, 1, 2}));
}

TEST_CASE("two-view group correlation equals the Pearson correlation of the projections") {
  Rng rng(31);
  const std::vector<TimeSeries> views = shared_latent_views(2, 1200, 3, 1.0, rng);
  const gcca::GccaModel model = gcca::fit_gcca(views, LagSpec({0}), 2);
  const gcca::SyncReport sync = gcca::sync_report(model, views);
  REQUIRE(sync.entries.size() == 2);
  for (const gcca::IscEntry& entry : sync.entries) {
    const Eigen::VectorXd p0 = gcca::view_projection(model, views[0], 0).col(entry.component);
    const Eigen::VectorXd p1 = gcca::view_projection(model, views[1], 1).col(entry.component);
    CHECK(std::abs(entry.isc - linalg::pearson(p0, p1)) < 1e-12);
    REQUIRE(entry.per_pair.size() == 1);
    CHECK(entry.per_pair[0] == doctest::Approx(entry.isc).epsilon(1e-14));
  }
}

TEST_CASE("identical views synchronize perfectly on the leading component") {
  Rng rng(32);
  const TimeSeries base = make_series(random_matrix(1000, 3, rng), 30.0, "v");
  const std::vector<TimeSeries> views{base, base, base};
  const gcca::GccaModel model = gcca::fit_gcca(views, LagSpec({-1, 0, 1}), 2);
  const gcca::SyncReport sync = gcca::sync_report(model, views);
  CHECK(std::abs(sync.entries[0].isc - 1.0) < 1e-8);
}

TEST_CASE("group correlation from the report matches the mean pairwise correlation") {
  Rng rng(33);
  const std::vector<TimeSeries> views = shared_latent_views(4, 1500, 3, 1.0, rng);
  const gcca::GccaModel model = gcca::fit_gcca(views, LagSpec({0}), 3);
  const gcca::SyncReport sync = gcca::sync_report(model, views);
  for (const gcca::IscEntry& entry : sync.entries) {
    std::vector<Eigen::VectorXd> cols;
    for (int v = 0; v < 4; ++v) {
      cols.push_back(gcca::view_projection(model, views[static_cast<size_t>(v)], v)
                         .col(entry.component));
    }
    CHECK(std::abs(entry.isc - mean_pairwise_pearson(cols)) < 1e-12);
    CHECK(entry.per_pair.size() == 6);
  }
}

TEST_CASE("the shared subspace is orthonormal on the fit window") {
  Rng rng(34);
  const std::vector<TimeSeries> views = shared_latent_views(3, 1200, 3, 1.0, rng);
  const gcca::GccaModel model = gcca::fit_gcca(views, LagSpec({-1, 0, 1}), 3);
  const Eigen::MatrixXd s = gcca::shared_subspace(model, views);
  const Eigen::MatrixXd gram = s.transpose() * s;
  CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("train group correlations are non-increasing and a strong latent leads") {
  Rng rng(35);
  const std::vector<TimeSeries> views = shared_latent_views(5, 2000, 4, 0.5, rng);
  const gcca::GccaModel model = gcca::fit_gcca(views, LagSpec({0}), 4);
  REQUIRE(model.train_isc.size() == 4);
  for (size_t i = 1; i < model.train_isc.size(); ++i) {
    CHECK(model.train_isc[i] <= model.train_isc[i - 1] + 1e-10);
  }
  CHECK(model.train_isc[0] > 0.5);
  // independent views by contrast synchronize weakly
  Rng rng2(36);
  std::vector<TimeSeries> indep;
  for (int v = 0; v < 5; ++v) indep.push_back(make_series(random_matrix(2000, 4, rng2), 30.0, "v"));
  const gcca::GccaModel null_model = gcca::fit_gcca(indep, LagSpec({0}), 4);
  CHECK(null_model.train_isc[0] < model.train_isc[0]);
}

TEST_CASE("a single-record segment fit equals the plain fit") {
  Rng rng(37);
  const std::vector<TimeSeries> views = shared_latent_views(3, 900, 2, 1.0, rng);
  const gcca::GccaModel a = gcca::fit_gcca(views, LagSpec({-1, 0, 1}), 2);
  const gcca::GccaModel b = gcca::fit_gcca_segments({views}, LagSpec({-1, 0, 1}), 2);
  for (size_t v = 0; v < 3; ++v) {
    CHECK((a.decoders[v] - b.decoders[v]).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("zero-variance confounds reproduce the plain multi-view fit") {
  Rng rng(38);
  const std::vector<TimeSeries> views = shared_latent_views(3, 900, 2, 1.0, rng);
  std::vector<cca::ConfoundSet> confounds;
  for (int v = 0; v < 3; ++v) {
    cca::ConfoundSet c;
    c.series = make_series(Eigen::MatrixXd::Zero(900, 1), 30.0, "c");
    c.lag_c = LagSpec({0});
    confounds.push_back(std::move(c));
  }
  const gcca::GccaModel plain = gcca::fit_gcca(views, LagSpec({0}), 2);
  const gcca::GccaModel partial = gcca::fit_gcca_partial(views, confounds, LagSpec({0}), 2);
  REQUIRE(partial.has_confounds);
  for (size_t v = 0; v < 3; ++v) {
    CHECK((plain.decoders[v] - partial.decoders[v]).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (size_t i = 0; i < plain.train_isc.size(); ++i) {
    CHECK(std::abs(plain.train_isc[i] - partial.train_isc[i]) < 1e-10);
  }
}

TEST_CASE("per-view confound regression removes a planted shared driver") {
  Rng rng(39);
  const Eigen::Index t = 3000;
  const Eigen::VectorXd driver = random_matrix(t, 1, rng);
  std::vector<TimeSeries> views;
  std::vector<cca::ConfoundSet> confounds;
  for (int v = 0; v < 3; ++v) {
    Eigen::MatrixXd m = random_matrix(t, 2, rng);
    m.col(0) += 4.0 * driver;
    m.col(1) += 4.0 * driver;
    views.push_back(make_series(std::move(m), 30.0, "v"));
    cca::ConfoundSet c;
    c.series = make_series(driver, 30.0, "c");
    c.lag_c = LagSpec({0});
    confounds.push_back(std::move(c));
  }
  const gcca::GccaModel plain = gcca::fit_gcca(views, LagSpec({0}), 1);
  const gcca::GccaModel partial = gcca::fit_gcca_partial(views, confounds, LagSpec({0}), 1);
  CHECK(plain.train_isc[0] > 0.8);
  CHECK(partial.train_isc[0] < 0.2);

  // evaluation honors the confound layout
  CHECK_THROWS_AS(gcca::sync_report(partial, views), invalid_argument);
  CHECK_NOTHROW(gcca::sync_report(partial, views, &confounds));
}

TEST_CASE("view count and channel mismatches are rejected") {
  Rng rng(40);
  const std::vector<TimeSeries> views = shared_latent_views(3, 500, 2, 1.0, rng);
  const gcca::GccaModel model = gcca::fit_gcca(views, LagSpec({0}), 1);

  std::vector<TimeSeries> two(views.begin(), views.begin() + 2);
  CHECK_THROWS_AS(gcca::sync_report(model, two), invalid_argument);

  CHECK_THROWS_AS(gcca::view_projection(model, views[0], 5), invalid_argument);

  std::vector<TimeSeries> bad = views;
  bad[1] = make_series(random_matrix(500, 4, rng), 30.0, "v");
  CHECK_THROWS_AS(gcca::sync_report(model, bad), invalid_argument);
}

TEST_CASE("fitting a single view is rejected") {
  Rng rng(41);
  std::vector<TimeSeries> one{make_series(random_matrix(300, 2, rng), 30.0, "v")};
  CHECK_THROWS_AS(gcca::fit_gcca(one, LagSpec({0}), 1), invalid_argument);
}
