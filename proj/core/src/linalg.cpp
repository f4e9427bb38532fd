#include "attndec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "attndec/errors.hpp"

namespace attndec::linalg {

TimeSeries center(const TimeSeries& series) {
  series.validate_shape("center");
  TimeSeries out = series;
  out.data.rowwise() -= series.data.colwise().mean();
  return out;
}

Eigen::MatrixXd lag_embed(const Eigen::MatrixXd& data, const LagSpec& spec) {
  spec.validate("lag_embed");
  if (data.rows() < 1 || data.cols() < 1)
    throw invalid_argument("lag_embed: empty input");
  const Eigen::Index t_len = data.rows();
  const Eigen::Index d = data.cols();
  const int l = spec.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t_len, d * l);
  for (int oi = 0; oi < l; ++oi) {
    const int o = spec.offsets[static_cast<std::size_t>(oi)];
    // rows t with 0 <= t + o < T
    const Eigen::Index t0 = std::max<Eigen::Index>(0, -o);
    const Eigen::Index t1 = std::min<Eigen::Index>(t_len, t_len - o);
    if (t1 <= t0) continue;  // offset larger than the series: block stays zero
    out.block(t0, static_cast<Eigen::Index>(oi) * d, t1 - t0, d) =
        data.middleRows(t0 + o, t1 - t0);
  }
  return out;
}

Eigen::MatrixXd lag_embed(const TimeSeries& series, const LagSpec& spec) {
  series.validate_shape("lag_embed");
  return lag_embed(series.data, spec);
}

namespace {

void add_relative_ridge(Eigen::MatrixXd& r, double ridge) {
  const double mean_diag = r.diagonal().mean();
  if (mean_diag > 0.0 && ridge > 0.0)
    r.diagonal().array() += ridge * mean_diag;
}

}  // namespace

CovarianceSet covariance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double ridge) {
  if (x.rows() != y.rows()) throw invalid_argument("covariance: row counts differ");
  if (x.rows() < 2) throw invalid_argument("covariance: needs at least two rows");
  if (ridge < 0.0) throw invalid_argument("covariance: ridge must be non-negative");
  const double denom = static_cast<double>(x.rows() - 1);
  CovarianceSet cs;
  cs.r_xx.noalias() = x.transpose() * x / denom;
  cs.r_yy.noalias() = y.transpose() * y / denom;
  cs.r_xy.noalias() = x.transpose() * y / denom;
  // enforce exact symmetry of the diagonal blocks before loading
  cs.r_xx = 0.5 * (cs.r_xx + cs.r_xx.transpose()).eval();
  cs.r_yy = 0.5 * (cs.r_yy + cs.r_yy.transpose()).eval();
  add_relative_ridge(cs.r_xx, ridge);
  add_relative_ridge(cs.r_yy, ridge);
  return cs;
}

Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& m, double rel_cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw numeric_degeneracy("pinv_psd: eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cutoff = rel_cutoff * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff && ev(i) > 0.0) inv(i) = 1.0 / ev(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd regress_out(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
  if (x.rows() != c.rows()) throw invalid_argument("regress_out: row counts differ");
  const Eigen::MatrixXd ctc = c.transpose() * c;
  const Eigen::MatrixXd beta = pinv_psd(ctc) * (c.transpose() * x);
  return x - c * beta;
}

Gevd sym_gevd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int k, const char* b_name) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw invalid_argument("sym_gevd: A and B must be square with matching size");
  if (k < 1 || k > n) throw invalid_argument("sym_gevd: K out of range");
  const double a_scale = a.cwiseAbs().maxCoeff();
  const double b_scale = b.cwiseAbs().maxCoeff();
  const double sym_tol = 1e-8;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > sym_tol * std::max(a_scale, 1e-300))
    throw invalid_argument("sym_gevd: A is not symmetric");
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > sym_tol * std::max(b_scale, 1e-300))
    throw invalid_argument("sym_gevd: B is not symmetric");

  const Eigen::MatrixXd a_sym = 0.5 * (a + a.transpose());
  const Eigen::MatrixXd b_sym = 0.5 * (b + b.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_b(b_sym);
  if (es_b.info() != Eigen::Success)
    throw numeric_degeneracy(std::string("sym_gevd: eigensolver failed on ") + b_name);
  const Eigen::VectorXd& d = es_b.eigenvalues();
  if (d.minCoeff() <= 0.0)
    throw numeric_degeneracy(std::string("sym_gevd: ") + b_name +
                             " is not positive definite (smallest eigenvalue " +
                             std::to_string(d.minCoeff()) + ")");

  // symmetric inverse square root of B
  const Eigen::MatrixXd w_b =
      es_b.eigenvectors() * d.cwiseSqrt().cwiseInverse().asDiagonal() * es_b.eigenvectors().transpose();

  Eigen::MatrixXd m = w_b * a_sym * w_b;
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_m(m);
  if (es_m.info() != Eigen::Success)
    throw numeric_degeneracy("sym_gevd: eigensolver failed on the whitened system");

  Gevd out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  // SelfAdjointEigenSolver sorts ascending; take the top K in descending order.
  for (int i = 0; i < k; ++i) {
    const Eigen::Index src = n - 1 - i;
    out.values(i) = es_m.eigenvalues()(src);
    out.vectors.col(i) = w_b * es_m.eigenvectors().col(src);
  }
  return out;
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw invalid_argument("pearson: needs at least two samples");
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double nx = xc.norm();
  const double ny = yc.norm();
  if (nx <= 0.0 || ny <= 0.0) return 0.0;  // zero-variance rule
  return xc.dot(yc) / (nx * ny);
}

std::vector<Eigen::Index> mask_lag_rows(const std::vector<bool>& keep, const LagSpec& spec) {
  spec.validate("mask_lag_rows");
  const Eigen::Index t_len = static_cast<Eigen::Index>(keep.size());
  std::vector<Eigen::Index> rows;
  rows.reserve(keep.size());
  for (Eigen::Index t = 0; t < t_len; ++t) {
    bool ok = true;
    for (int o : spec.offsets) {
      const Eigen::Index p = t + o;
      if (p >= 0 && p < t_len && !keep[static_cast<std::size_t>(p)]) {
        ok = false;
        break;
      }
    }
    if (ok && keep[static_cast<std::size_t>(t)]) rows.push_back(t);
  }
  return rows;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= m.rows()) throw invalid_argument("select_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

}  // namespace attndec::linalg
