#include "attndec/cca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "attndec/errors.hpp"

namespace attndec::cca {

LagSpec default_stimulus_lags() { return LagSpec::past(15); }
LagSpec default_data_lags() { return LagSpec::centered(3); }

namespace {

int max_abs_offset(const LagSpec& spec) {
  int m = 0;
  for (int o : spec.offsets) m = std::max(m, std::abs(o));
  return m;
}

// Joint Gram of the lag-embedded (and optionally residualized) training rows.
// Accumulating per recording keeps memory flat and keeps lag windows from
// straddling recording boundaries; the pooled Gram is algebraically identical
// to embedding the concatenated rows.
struct JointGram {
  Eigen::MatrixXd g;     // [X Y C]^T [X Y C], joint columns
  Eigen::VectorXd sums;  // column sums of [X Y C]
  long long rows = 0;
  Eigen::Index dx = 0, dy = 0, dc = 0;
};

JointGram accumulate_grams(const std::vector<TimeSeries>& xs, const std::vector<TimeSeries>& ys,
                           const std::vector<ConfoundSet>* confounds, const LagSpec& lag_x,
                           const LagSpec& lag_y, const LagSpec& lag_c) {
  if (xs.empty()) throw invalid_argument("fit: no training recordings");
  if (xs.size() != ys.size()) throw invalid_argument("fit: X and Y recording counts differ");
  if (confounds && confounds->size() != xs.size())
    throw invalid_argument("fit: confound recording count differs from data");
  lag_x.validate("fit lag_x");
  lag_y.validate("fit lag_y");
  if (confounds) lag_c.validate("fit lag_c");

  JointGram jg;
  jg.dx = xs[0].channels() * lag_x.size();
  jg.dy = ys[0].channels() * lag_y.size();
  jg.dc = confounds ? (*confounds)[0].series.channels() * lag_c.size() : 0;
  const Eigen::Index dim = jg.dx + jg.dy + jg.dc;
  jg.g = Eigen::MatrixXd::Zero(dim, dim);
  jg.sums = Eigen::VectorXd::Zero(dim);

  const int need = std::max({max_abs_offset(lag_x), max_abs_offset(lag_y),
                             confounds ? max_abs_offset(lag_c) : 0});
  for (std::size_t r = 0; r < xs.size(); ++r) {
    const TimeSeries& x = xs[r];
    const TimeSeries& y = ys[r];
    x.validate_shape("fit x");
    y.validate_shape("fit y");
    if (x.samples() != y.samples()) throw invalid_argument("fit: X and Y sample counts differ");
    if (x.rate != y.rate) throw invalid_argument("fit: X and Y sampling rates differ");
    if (x.channels() != xs[0].channels() || y.channels() != ys[0].channels())
      throw invalid_argument("fit: channel counts differ across recordings");
    if (x.rate != xs[0].rate) throw invalid_argument("fit: sampling rates differ across recordings");
    if (x.samples() <= need)
      throw invalid_argument("fit: recording shorter than the largest lag offset");

    Eigen::MatrixXd z(x.samples(), dim);
    z.leftCols(jg.dx) = linalg::lag_embed(linalg::center(x), lag_x);
    z.middleCols(jg.dx, jg.dy) = linalg::lag_embed(linalg::center(y), lag_y);
    if (confounds) {
      const ConfoundSet& cs = (*confounds)[r];
      cs.series.validate_shape("fit confounds");
      if (cs.series.samples() != x.samples())
        throw invalid_argument("fit: confound sample count differs from data");
      if (cs.series.rate != x.rate)
        throw invalid_argument("fit: confound sampling rate differs from data");
      if (cs.series.channels() != (*confounds)[0].series.channels())
        throw invalid_argument("fit: confound channel counts differ across recordings");
      z.rightCols(jg.dc) = linalg::lag_embed(linalg::center(cs.series), lag_c);
    }
    jg.g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
    jg.sums += z.colwise().sum();
    jg.rows += x.samples();
  }
  jg.g = jg.g.selfadjointView<Eigen::Lower>();
  return jg;
}

// Remove the confound columns from the Gram blocks. This is the expanded
// (X - C b)^T (X - C b) identity, so it matches explicit residualization of
// the pooled rows exactly, without materializing them.
void residualize_gram(JointGram& jg) {
  if (jg.dc == 0) return;
  const Eigen::Index dxy = jg.dx + jg.dy;
  const Eigen::MatrixXd gcc = jg.g.block(dxy, dxy, jg.dc, jg.dc);
  const Eigen::MatrixXd gcd = jg.g.block(dxy, 0, jg.dc, dxy);  // C^T [X Y]
  const Eigen::MatrixXd beta = linalg::pinv_psd(gcc) * gcd;    // dc x (dx+dy)
  Eigen::MatrixXd gdd = jg.g.topLeftCorner(dxy, dxy);
  gdd -= gcd.transpose() * beta;
  gdd -= beta.transpose() * gcd;
  gdd += beta.transpose() * gcc * beta;
  jg.g.topLeftCorner(dxy, dxy) = gdd;
  jg.sums.head(dxy) -= beta.transpose() * jg.sums.tail(jg.dc);
  jg.dc = 0;
}

double add_ridge(Eigen::MatrixXd& r, double ridge) {
  r = 0.5 * (r + r.transpose()).eval();
  const double mean_diag = r.diagonal().mean();
  if (mean_diag > 0.0 && ridge > 0.0) r.diagonal().array() += ridge * mean_diag;
  return mean_diag;
}

CcaModel fit_from_grams(JointGram jg, const LagSpec& lag_x, const LagSpec& lag_y, int k,
                        double ridge, bool has_confounds, const LagSpec& lag_c,
                        int n_channels_c, int n_channels_x, int n_channels_y) {
  if (ridge < 0.0) throw invalid_argument("fit: ridge must be non-negative");
  if (jg.rows < 2) throw invalid_argument("fit: needs at least two samples");
  if (k < 1 || k > std::min(jg.dx, jg.dy))
    throw invalid_argument("fit: K must satisfy 1 <= K <= min(embedded dims)");

  residualize_gram(jg);

  const double denom = static_cast<double>(jg.rows - 1);
  Eigen::MatrixXd r_xx = jg.g.topLeftCorner(jg.dx, jg.dx) / denom;
  Eigen::MatrixXd r_yy = jg.g.block(jg.dx, jg.dx, jg.dy, jg.dy) / denom;
  const Eigen::MatrixXd r_xy = jg.g.block(0, jg.dx, jg.dx, jg.dy) / denom;
  add_ridge(r_xx, ridge);
  add_ridge(r_yy, ridge);

  const Eigen::Index n = jg.dx + jg.dy;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.topLeftCorner(jg.dx, jg.dx) = r_xx;
  a.bottomRightCorner(jg.dy, jg.dy) = r_yy;
  a.topRightCorner(jg.dx, jg.dy) = r_xy;
  a.bottomLeftCorner(jg.dy, jg.dx) = r_xy.transpose();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  b.topLeftCorner(jg.dx, jg.dx) = r_xx;
  b.bottomRightCorner(jg.dy, jg.dy) = r_yy;

  const linalg::Gevd gevd = linalg::sym_gevd(a, b, k, "block-diagonal covariance");

  CcaModel model;
  model.lag_x = lag_x;
  model.lag_y = lag_y;
  model.n_channels_x = n_channels_x;
  model.n_channels_y = n_channels_y;
  model.k = k;
  model.w_x = gevd.vectors.topRows(jg.dx);
  model.w_y = gevd.vectors.bottomRows(jg.dy);
  model.train_corrs.resize(static_cast<std::size_t>(k));
  model.sign_flips.resize(static_cast<std::size_t>(k));
  model.has_confounds = has_confounds;
  model.lag_c = lag_c;
  model.n_channels_c = n_channels_c;

  const double inv_rows = 1.0 / static_cast<double>(jg.rows);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd wx = model.w_x.col(j);
    Eigen::VectorXd wy = model.w_y.col(j);
    const double vx = wx.dot(r_xx * wx);
    const double vy = wy.dot(r_yy * wy);
    if (vx <= 0.0 || vy <= 0.0)
      throw numeric_degeneracy("fit: component " + std::to_string(j + 1) +
                               " has non-positive training variance");
    wx /= std::sqrt(vx);
    wy /= std::sqrt(vy);

    // deterministic orientation: the x weight with the largest magnitude is positive
    Eigen::Index imax = 0;
    wx.cwiseAbs().maxCoeff(&imax);
    if (wx(imax) < 0.0) {
      wx = -wx;
      wy = -wy;
    }

    // training correlation as evaluate() would compute it (projection means removed)
    const double sx = wx.dot(jg.sums.head(jg.dx));
    const double sy = wy.dot(jg.sums.segment(jg.dx, jg.dy));
    const double gxx = wx.dot(jg.g.topLeftCorner(jg.dx, jg.dx) * wx);
    const double gyy = wy.dot(jg.g.block(jg.dx, jg.dx, jg.dy, jg.dy) * wy);
    const double gxy = wx.dot(jg.g.block(0, jg.dx, jg.dx, jg.dy) * wy);
    const double var_x = gxx - sx * sx * inv_rows;
    const double var_y = gyy - sy * sy * inv_rows;
    double corr = 0.0;
    if (var_x > 0.0 && var_y > 0.0) corr = (gxy - sx * sy * inv_rows) / std::sqrt(var_x * var_y);

    int flip = 1;
    if (corr < 0.0) {
      flip = -1;
      wy = -wy;
      corr = -corr;
    }
    model.w_x.col(j) = wx;
    model.w_y.col(j) = wy;
    model.train_corrs[static_cast<std::size_t>(j)] = std::min(corr, 1.0);
    model.sign_flips[static_cast<std::size_t>(j)] = flip;
  }
  return model;
}

}  // namespace

CcaModel fit_cca_segments(const std::vector<TimeSeries>& xs, const std::vector<TimeSeries>& ys,
                          const LagSpec& lag_x, const LagSpec& lag_y, int k, double ridge) {
  JointGram jg = accumulate_grams(xs, ys, nullptr, lag_x, lag_y, LagSpec{});
  return fit_from_grams(std::move(jg), lag_x, lag_y, k, ridge, false, LagSpec{}, 0,
                        static_cast<int>(xs[0].channels()), static_cast<int>(ys[0].channels()));
}

CcaModel fit_cca(const TimeSeries& x, const TimeSeries& y, const LagSpec& lag_x,
                 const LagSpec& lag_y, int k, double ridge) {
  return fit_cca_segments({x}, {y}, lag_x, lag_y, k, ridge);
}

CcaModel fit_pcca_segments(const std::vector<TimeSeries>& xs, const std::vector<TimeSeries>& ys,
                           const std::vector<ConfoundSet>& confounds, const LagSpec& lag_x,
                           const LagSpec& lag_y, int k, double ridge) {
  if (confounds.empty()) throw invalid_argument("fit_pcca: no confound recordings");
  const LagSpec lag_c = confounds[0].lag_c;
  for (const ConfoundSet& cs : confounds) {
    if (cs.lag_c.offsets != lag_c.offsets)
      throw invalid_argument("fit_pcca: confound lag specs differ across recordings");
  }
  JointGram jg = accumulate_grams(xs, ys, &confounds, lag_x, lag_y, lag_c);
  return fit_from_grams(std::move(jg), lag_x, lag_y, k, ridge, true, lag_c,
                        static_cast<int>(confounds[0].series.channels()),
                        static_cast<int>(xs[0].channels()), static_cast<int>(ys[0].channels()));
}

CcaModel fit_pcca(const TimeSeries& x, const TimeSeries& y, const ConfoundSet& confounds,
                  const LagSpec& lag_x, const LagSpec& lag_y, int k, double ridge) {
  return fit_pcca_segments({x}, {y}, {confounds}, lag_x, lag_y, k, ridge);
}

namespace {

// Shared evaluation path: center the segment, embed, optionally residualize,
// project onto the stored weights.
Eigen::MatrixXd project_side(const Eigen::MatrixXd& w, const LagSpec& lag, const TimeSeries& s,
                             const CcaModel& model, const ConfoundSet* confounds) {
  Eigen::MatrixXd embedded = linalg::lag_embed(linalg::center(s), lag);
  if (model.has_confounds) {
    if (!confounds)
      throw invalid_argument("evaluate: model was fit with confounds; a confound segment is required");
    confounds->series.validate_shape("evaluate confounds");
    if (confounds->series.samples() != s.samples())
      throw invalid_argument("evaluate: confound sample count differs from the segment");
    if (confounds->series.rate != s.rate)
      throw invalid_argument("evaluate: confound sampling rate differs from the segment");
    if (confounds->series.channels() != model.n_channels_c)
      throw invalid_argument("evaluate: confound channel count differs from the fitted layout");
    if (confounds->lag_c.offsets != model.lag_c.offsets)
      throw invalid_argument("evaluate: confound lag spec differs from the fitted layout");
    const Eigen::MatrixXd ce = linalg::lag_embed(linalg::center(confounds->series), model.lag_c);
    embedded = linalg::regress_out(embedded, ce);
  } else if (confounds) {
    throw invalid_argument("evaluate: model was fit without confounds");
  }
  return embedded * w;
}

void check_pair(const CcaModel& model, const TimeSeries& x, const TimeSeries& y) {
  x.validate_shape("evaluate x");
  y.validate_shape("evaluate y");
  if (model.k < 1) throw invalid_argument("evaluate: model has no components");
  if (x.channels() != model.n_channels_x)
    throw invalid_argument("evaluate: x channel count differs from the fitted layout");
  if (y.channels() != model.n_channels_y)
    throw invalid_argument("evaluate: y channel count differs from the fitted layout");
  if (x.samples() != y.samples()) throw invalid_argument("evaluate: sample counts differ");
  if (x.rate != y.rate) throw invalid_argument("evaluate: sampling rates differ");
  const int need = std::max(max_abs_offset(model.lag_x), max_abs_offset(model.lag_y));
  if (x.samples() <= need)
    throw invalid_argument("evaluate: segment shorter than the largest lag offset");
}

// Rounding-level reference for one projected component. Centering a constant
// (railed) channel leaves ~eps-sized dust, never exact zeros, so the dead test
// must be relative to the segment's raw magnitude, not an exact-zero check.
double dead_scale(const TimeSeries& s, const Eigen::MatrixXd& w, Eigen::Index j) {
  return 1e-12 * s.data.norm() * w.col(j).norm();
}

// True when the centered projection has no variation beyond rounding: such a
// component carries no evidence and must not be normalized into junk.
bool dead_column(const Eigen::Ref<const Eigen::VectorXd>& p, double scale) {
  const double mean = p.mean();
  return (p.array() - mean).matrix().norm() <= scale;
}

std::vector<double> evaluate_impl(const CcaModel& model, const TimeSeries& x, const TimeSeries& y,
                                  const ConfoundSet* confounds) {
  check_pair(model, x, y);
  const Eigen::MatrixXd px = project_side(model.w_x, model.lag_x, x, model, confounds);
  const Eigen::MatrixXd py = project_side(model.w_y, model.lag_y, y, model, confounds);
  std::vector<double> corrs(static_cast<std::size_t>(model.k));
  for (int j = 0; j < model.k; ++j) {
    const bool dead = dead_column(px.col(j), dead_scale(x, model.w_x, j)) ||
                      dead_column(py.col(j), dead_scale(y, model.w_y, j));
    corrs[static_cast<std::size_t>(j)] = dead ? 0.0 : linalg::pearson(px.col(j), py.col(j));
  }
  return corrs;
}

StandardizedProjection standardize(Eigen::MatrixXd p, const TimeSeries& s,
                                   const Eigen::MatrixXd& w) {
  StandardizedProjection sp;
  sp.ok.resize(static_cast<std::size_t>(p.cols()), true);
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    if (dead_column(p.col(j), dead_scale(s, w, j))) {
      p.col(j).setZero();
      sp.ok[static_cast<std::size_t>(j)] = false;
      continue;
    }
    p.col(j).array() -= p.col(j).mean();
    p.col(j) /= p.col(j).norm();
  }
  sp.z = std::move(p);
  return sp;
}

}  // namespace

std::vector<double> evaluate(const CcaModel& model, const TimeSeries& x, const TimeSeries& y) {
  return evaluate_impl(model, x, y, nullptr);
}

std::vector<double> evaluate(const CcaModel& model, const TimeSeries& x, const TimeSeries& y,
                             const ConfoundSet& confounds) {
  return evaluate_impl(model, x, y, &confounds);
}

double correlation_sum(const std::vector<double>& corrs, int m) {
  if (corrs.empty()) throw invalid_argument("correlation_sum: empty correlation vector");
  if (m < 1 || m > static_cast<int>(corrs.size()))
    throw invalid_argument("correlation_sum: m must satisfy 1 <= m <= K");
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += corrs[static_cast<std::size_t>(i)];
  return sum;
}

StandardizedProjection project_x(const CcaModel& model, const TimeSeries& x,
                                 const ConfoundSet* confounds) {
  x.validate_shape("project_x");
  if (x.channels() != model.n_channels_x)
    throw invalid_argument("project_x: channel count differs from the fitted layout");
  return standardize(project_side(model.w_x, model.lag_x, x, model, confounds), x, model.w_x);
}

StandardizedProjection project_y(const CcaModel& model, const TimeSeries& y,
                                 const ConfoundSet* confounds) {
  y.validate_shape("project_y");
  if (y.channels() != model.n_channels_y)
    throw invalid_argument("project_y: channel count differs from the fitted layout");
  return standardize(project_side(model.w_y, model.lag_y, y, model, confounds), y, model.w_y);
}

}  // namespace attndec::cca
