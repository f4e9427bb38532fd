#include "attndec/gcca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "attndec/errors.hpp"

namespace attndec::gcca {

LagSpec default_view_lags() { return LagSpec::centered(5); }

namespace {

int max_abs_offset(const LagSpec& spec) {
  int m = 0;
  for (int o : spec.offsets) m = std::max(m, std::abs(o));
  return m;
}

struct BlockGram {
  Eigen::MatrixXd g;              // joint gram of [views..., confounds...]
  Eigen::VectorXd sums;
  long long rows = 0;
  std::vector<Eigen::Index> dim;       // embedded dim per view
  std::vector<Eigen::Index> dim_c;     // embedded confound dim per view (0 if none)
  Eigen::Index data_dim = 0;           // sum of dim
};

BlockGram accumulate(const std::vector<std::vector<TimeSeries>>& records,
                     const std::vector<std::vector<cca::ConfoundSet>>* confounds,
                     const LagSpec& lag, const LagSpec& lag_c) {
  if (records.empty()) throw invalid_argument("fit_gcca: no training recordings");
  const std::size_t n_views = records[0].size();
  if (n_views < 2) throw invalid_argument("fit_gcca: needs at least two views");
  lag.validate("fit_gcca lag");
  if (confounds) lag_c.validate("fit_gcca lag_c");

  BlockGram bg;
  bg.dim.resize(n_views);
  bg.dim_c.assign(n_views, 0);
  for (std::size_t v = 0; v < n_views; ++v)
    bg.dim[v] = records[0][v].channels() * lag.size();
  bg.data_dim = 0;
  for (Eigen::Index d : bg.dim) bg.data_dim += d;
  Eigen::Index total = bg.data_dim;
  if (confounds) {
    if (confounds->size() != records.size())
      throw invalid_argument("fit_gcca: confound recording count differs from data");
    if ((*confounds)[0].size() != n_views)
      throw invalid_argument("fit_gcca: confound view count differs from data");
    for (std::size_t v = 0; v < n_views; ++v) {
      bg.dim_c[v] = (*confounds)[0][v].series.channels() * lag_c.size();
      total += bg.dim_c[v];
    }
  }
  bg.g = Eigen::MatrixXd::Zero(total, total);
  bg.sums = Eigen::VectorXd::Zero(total);

  const int need = std::max(max_abs_offset(lag), confounds ? max_abs_offset(lag_c) : 0);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != n_views) throw invalid_argument("fit_gcca: view counts differ across recordings");
    const Eigen::Index t_len = rec[0].samples();
    Eigen::MatrixXd z(t_len, total);
    Eigen::Index col = 0;
    for (std::size_t v = 0; v < n_views; ++v) {
      const TimeSeries& s = rec[v];
      s.validate_shape("fit_gcca view");
      if (s.samples() != t_len) throw invalid_argument("fit_gcca: views have different sample counts");
      if (s.rate != rec[0].rate) throw invalid_argument("fit_gcca: views have different sampling rates");
      if (s.channels() * lag.size() != bg.dim[v])
        throw invalid_argument("fit_gcca: channel counts differ across recordings");
      if (s.samples() <= need)
        throw invalid_argument("fit_gcca: recording shorter than the largest lag offset");
      z.middleCols(col, bg.dim[v]) = linalg::lag_embed(linalg::center(s), lag);
      col += bg.dim[v];
    }
    if (confounds) {
      for (std::size_t v = 0; v < n_views; ++v) {
        const cca::ConfoundSet& cs = (*confounds)[r][v];
        cs.series.validate_shape("fit_gcca confounds");
        if (cs.series.samples() != t_len)
          throw invalid_argument("fit_gcca: confound sample count differs from data");
        if (cs.series.channels() * lag_c.size() != bg.dim_c[v])
          throw invalid_argument("fit_gcca: confound channel counts differ across recordings");
        if (cs.lag_c.offsets != lag_c.offsets)
          throw invalid_argument("fit_gcca: confound lag specs differ across recordings");
        z.middleCols(col, bg.dim_c[v]) = linalg::lag_embed(linalg::center(cs.series), lag_c);
        col += bg.dim_c[v];
      }
    }
    bg.g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
    bg.sums += z.colwise().sum();
    bg.rows += t_len;
  }
  bg.g = bg.g.selfadjointView<Eigen::Lower>();
  return bg;
}

// Residualize each view against its own confound block. Cross-view Gram
// blocks pick up the matching cross terms of (X_i - C_i b_i)^T (X_j - C_j b_j).
void residualize(BlockGram& bg) {
  const std::size_t n_views = bg.dim.size();
  bool any = false;
  for (Eigen::Index d : bg.dim_c) any = any || d > 0;
  if (!any) return;

  std::vector<Eigen::Index> data_off(n_views), conf_off(n_views);
  Eigen::Index off = 0;
  for (std::size_t v = 0; v < n_views; ++v) {
    data_off[v] = off;
    off += bg.dim[v];
  }
  for (std::size_t v = 0; v < n_views; ++v) {
    conf_off[v] = off;
    off += bg.dim_c[v];
  }

  std::vector<Eigen::MatrixXd> beta(n_views);  // dc_v x d_v
  for (std::size_t v = 0; v < n_views; ++v) {
    if (bg.dim_c[v] == 0) {
      beta[v] = Eigen::MatrixXd::Zero(0, bg.dim[v]);
      continue;
    }
    const Eigen::MatrixXd gcc = bg.g.block(conf_off[v], conf_off[v], bg.dim_c[v], bg.dim_c[v]);
    const Eigen::MatrixXd gcx = bg.g.block(conf_off[v], data_off[v], bg.dim_c[v], bg.dim[v]);
    beta[v] = linalg::pinv_psd(gcc) * gcx;
  }

  Eigen::MatrixXd g_new = Eigen::MatrixXd::Zero(bg.data_dim, bg.data_dim);
  Eigen::VectorXd sums_new = Eigen::VectorXd::Zero(bg.data_dim);
  for (std::size_t i = 0; i < n_views; ++i) {
    sums_new.segment(data_off[i], bg.dim[i]) =
        bg.sums.segment(data_off[i], bg.dim[i]) -
        beta[i].transpose() * bg.sums.segment(conf_off[i], bg.dim_c[i]);
    for (std::size_t j = 0; j < n_views; ++j) {
      Eigen::MatrixXd gij = bg.g.block(data_off[i], data_off[j], bg.dim[i], bg.dim[j]);
      if (bg.dim_c[j] > 0)
        gij -= bg.g.block(data_off[i], conf_off[j], bg.dim[i], bg.dim_c[j]) * beta[j];
      if (bg.dim_c[i] > 0)
        gij -= beta[i].transpose() * bg.g.block(conf_off[i], data_off[j], bg.dim_c[i], bg.dim[j]);
      if (bg.dim_c[i] > 0 && bg.dim_c[j] > 0)
        gij += beta[i].transpose() *
               bg.g.block(conf_off[i], conf_off[j], bg.dim_c[i], bg.dim_c[j]) * beta[j];
      g_new.block(data_off[i], data_off[j], bg.dim[i], bg.dim[j]) = gij;
    }
  }
  bg.g = std::move(g_new);
  bg.sums = std::move(sums_new);
  bg.dim_c.assign(n_views, 0);
}

GccaModel fit_from_gram(BlockGram bg, const std::vector<TimeSeries>& first_record,
                        const LagSpec& lag, int k, double ridge, bool has_confounds,
                        const LagSpec& lag_c, std::vector<int> n_channels_c) {
  const std::size_t n_views = bg.dim.size();
  if (ridge < 0.0) throw invalid_argument("fit_gcca: ridge must be non-negative");
  if (bg.rows < 2) throw invalid_argument("fit_gcca: needs at least two samples");
  Eigen::Index min_dim = bg.dim[0];
  for (Eigen::Index d : bg.dim) min_dim = std::min(min_dim, d);
  if (k < 1 || k > min_dim)
    throw invalid_argument("fit_gcca: K must satisfy 1 <= K <= smallest embedded view dim");

  residualize(bg);

  std::vector<Eigen::Index> off(n_views);
  Eigen::Index o = 0;
  for (std::size_t v = 0; v < n_views; ++v) {
    off[v] = o;
    o += bg.dim[v];
  }

  const double denom = static_cast<double>(bg.rows - 1);
  Eigen::MatrixXd r_full = bg.g.topLeftCorner(bg.data_dim, bg.data_dim) / denom;
  r_full = 0.5 * (r_full + r_full.transpose()).eval();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(bg.data_dim, bg.data_dim);
  for (std::size_t v = 0; v < n_views; ++v) {
    Eigen::MatrixXd blk = r_full.block(off[v], off[v], bg.dim[v], bg.dim[v]);
    const double mean_diag = blk.diagonal().mean();
    if (mean_diag > 0.0 && ridge > 0.0) blk.diagonal().array() += ridge * mean_diag;
    r_full.block(off[v], off[v], bg.dim[v], bg.dim[v]) = blk;
    b.block(off[v], off[v], bg.dim[v], bg.dim[v]) = blk;
  }

  const linalg::Gevd gevd = linalg::sym_gevd(r_full, b, k, "block-diagonal view covariance");

  GccaModel model;
  model.lag = lag;
  model.k = k;
  model.has_confounds = has_confounds;
  model.lag_c = lag_c;
  model.n_channels_c = std::move(n_channels_c);
  model.decoders.resize(n_views);
  model.n_channels.resize(n_views);
  model.view_labels.resize(n_views);

  Eigen::MatrixXd w = gevd.vectors;  // data_dim x k
  // deterministic orientation: largest-magnitude entry of each stacked column positive
  for (int j = 0; j < k; ++j) {
    Eigen::Index imax = 0;
    w.col(j).cwiseAbs().maxCoeff(&imax);
    if (w(imax, j) < 0.0) w.col(j) = -w.col(j);
  }

  for (std::size_t v = 0; v < n_views; ++v) {
    model.decoders[v] = w.middleRows(off[v], bg.dim[v]);
    model.n_channels[v] = static_cast<int>(first_record[v].channels());
    model.view_labels[v] = "view" + std::to_string(v + 1);
  }

  // training ISC and shared-subspace column norms, straight from the Gram
  model.train_isc.assign(static_cast<std::size_t>(k), 0.0);
  model.train_scale.assign(static_cast<std::size_t>(k), 0.0);
  const Eigen::MatrixXd g_data = bg.g.topLeftCorner(bg.data_dim, bg.data_dim);
  const double inv_rows = 1.0 / static_cast<double>(bg.rows);
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd wj = w.col(j);
    model.train_scale[static_cast<std::size_t>(j)] = std::sqrt(std::max(wj.dot(g_data * wj), 0.0));
    double acc = 0.0;
    int n_pairs = 0;
    std::vector<double> var(n_views), sum(n_views);
    for (std::size_t v = 0; v < n_views; ++v) {
      const Eigen::VectorXd wv = model.decoders[v].col(j);
      sum[v] = wv.dot(bg.sums.segment(off[v], bg.dim[v]));
      var[v] = wv.dot(g_data.block(off[v], off[v], bg.dim[v], bg.dim[v]) * wv) -
               sum[v] * sum[v] * inv_rows;
    }
    for (std::size_t i = 0; i < n_views; ++i) {
      for (std::size_t jj = i + 1; jj < n_views; ++jj) {
        const Eigen::VectorXd wi = model.decoders[i].col(j);
        const Eigen::VectorXd wjj = model.decoders[jj].col(j);
        const double cov = wi.dot(g_data.block(off[i], off[jj], bg.dim[i], bg.dim[jj]) * wjj) -
                           sum[i] * sum[jj] * inv_rows;
        double r = 0.0;
        if (var[i] > 0.0 && var[jj] > 0.0) r = cov / std::sqrt(var[i] * var[jj]);
        acc += r;
        ++n_pairs;
      }
    }
    model.train_isc[static_cast<std::size_t>(j)] = acc / static_cast<double>(n_pairs);
  }
  return model;
}

void check_views(const GccaModel& model, const std::vector<TimeSeries>& views,
                 const std::vector<cca::ConfoundSet>* confounds) {
  if (views.size() != model.decoders.size())
    throw invalid_argument("gcca: view count differs from the fitted layout");
  const Eigen::Index t_len = views[0].samples();
  for (std::size_t v = 0; v < views.size(); ++v) {
    views[v].validate_shape("gcca view");
    if (views[v].samples() != t_len) throw invalid_argument("gcca: views have different sample counts");
    if (views[v].channels() != model.n_channels[v])
      throw invalid_argument("gcca: view channel count differs from the fitted layout");
  }
  if (t_len <= max_abs_offset(model.lag))
    throw invalid_argument("gcca: window shorter than the largest lag offset");
  if (model.has_confounds) {
    if (!confounds)
      throw invalid_argument("gcca: model was fit with confounds; confound views are required");
    if (confounds->size() != views.size())
      throw invalid_argument("gcca: confound view count differs from data");
    for (std::size_t v = 0; v < views.size(); ++v) {
      (*confounds)[v].series.validate_shape("gcca confound view");
      if ((*confounds)[v].series.samples() != t_len)
        throw invalid_argument("gcca: confound sample count differs from data");
      if ((*confounds)[v].series.channels() != model.n_channels_c[v])
        throw invalid_argument("gcca: confound channel count differs from the fitted layout");
      if ((*confounds)[v].lag_c.offsets != model.lag_c.offsets)
        throw invalid_argument("gcca: confound lag spec differs from the fitted layout");
    }
  } else if (confounds) {
    throw invalid_argument("gcca: model was fit without confounds");
  }
}

Eigen::MatrixXd project_view(const GccaModel& model, const std::vector<TimeSeries>& views,
                             std::size_t v, const std::vector<cca::ConfoundSet>* confounds) {
  Eigen::MatrixXd embedded = linalg::lag_embed(linalg::center(views[v]), model.lag);
  if (model.has_confounds) {
    const Eigen::MatrixXd ce =
        linalg::lag_embed(linalg::center((*confounds)[v].series), model.lag_c);
    embedded = linalg::regress_out(embedded, ce);
  }
  return embedded * model.decoders[v];
}

}  // namespace

GccaModel fit_gcca_segments(const std::vector<std::vector<TimeSeries>>& records,
                            const LagSpec& lag, int k, double ridge) {
  BlockGram bg = accumulate(records, nullptr, lag, LagSpec{});
  return fit_from_gram(std::move(bg), records[0], lag, k, ridge, false, LagSpec{}, {});
}

GccaModel fit_gcca(const std::vector<TimeSeries>& views, const LagSpec& lag, int k, double ridge) {
  return fit_gcca_segments({views}, lag, k, ridge);
}

GccaModel fit_gcca_partial_segments(const std::vector<std::vector<TimeSeries>>& records,
                                    const std::vector<std::vector<cca::ConfoundSet>>& confounds,
                                    const LagSpec& lag, int k, double ridge) {
  if (confounds.empty()) throw invalid_argument("fit_gcca_partial: no confound recordings");
  const LagSpec lag_c = confounds[0][0].lag_c;
  BlockGram bg = accumulate(records, &confounds, lag, lag_c);
  std::vector<int> n_channels_c;
  n_channels_c.reserve(confounds[0].size());
  for (const auto& cs : confounds[0]) n_channels_c.push_back(static_cast<int>(cs.series.channels()));
  return fit_from_gram(std::move(bg), records[0], lag, k, ridge, true, lag_c,
                       std::move(n_channels_c));
}

GccaModel fit_gcca_partial(const std::vector<TimeSeries>& views,
                           const std::vector<cca::ConfoundSet>& confounds, const LagSpec& lag,
                           int k, double ridge) {
  return fit_gcca_partial_segments({views}, {confounds}, lag, k, ridge);
}

Eigen::MatrixXd view_projection(const GccaModel& model, const TimeSeries& view, int view_index,
                                const cca::ConfoundSet* confound) {
  if (view_index < 0 || view_index >= static_cast<int>(model.decoders.size())) {
    throw invalid_argument("view_projection: view index out of range");
  }
  if (view.channels() != model.n_channels[static_cast<std::size_t>(view_index)]) {
    throw invalid_argument("view_projection: channel count differs from the fitted layout");
  }
  Eigen::MatrixXd embedded = linalg::lag_embed(linalg::center(view), model.lag);
  if (model.has_confounds) {
    if (!confound) throw invalid_argument("view_projection: model was fit with confounds");
    if (confound->lag_c.offsets != model.lag_c.offsets) {
      throw invalid_argument("view_projection: confound lag spec differs from the fitted layout");
    }
    const Eigen::MatrixXd ce = linalg::lag_embed(linalg::center(confound->series), model.lag_c);
    embedded = linalg::regress_out(embedded, ce);
  } else if (confound) {
    throw invalid_argument("view_projection: model was fit without confounds");
  }
  return embedded * model.decoders[static_cast<std::size_t>(view_index)];
}

Eigen::MatrixXd shared_subspace(const GccaModel& model, const std::vector<TimeSeries>& views,
                                const std::vector<cca::ConfoundSet>* confounds) {
  check_views(model, views, confounds);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(views[0].samples(), model.k);
  for (std::size_t v = 0; v < views.size(); ++v) s += project_view(model, views, v, confounds);
  for (int j = 0; j < model.k; ++j) {
    const double norm = s.col(j).norm();
    if (!(norm > 0.0))
      throw numeric_degeneracy("shared_subspace: component " + std::to_string(j + 1) +
                               " has zero variance on this window");
    s.col(j) /= norm;
  }
  return s;
}

IscEntry isc(const GccaModel& model, const std::vector<TimeSeries>& views, int component,
             const std::vector<cca::ConfoundSet>* confounds) {
  check_views(model, views, confounds);
  if (component < 0 || component >= model.k)
    throw invalid_argument("isc: component index out of range");
  const std::size_t n_views = views.size();
  std::vector<Eigen::VectorXd> proj(n_views);
  for (std::size_t v = 0; v < n_views; ++v)
    proj[v] = project_view(model, views, v, confounds).col(component);

  IscEntry entry;
  entry.component = component;
  entry.per_pair.reserve(n_views * (n_views - 1) / 2);
  double acc = 0.0;
  for (std::size_t i = 0; i < n_views; ++i) {
    for (std::size_t j = i + 1; j < n_views; ++j) {
      const double r = linalg::pearson(proj[i], proj[j]);
      entry.per_pair.push_back(r);
      acc += r;
    }
  }
  entry.isc = acc / static_cast<double>(entry.per_pair.size());
  return entry;
}

SyncReport sync_report(const GccaModel& model, const std::vector<TimeSeries>& views,
                       const std::vector<cca::ConfoundSet>* confounds) {
  check_views(model, views, confounds);
  const std::size_t n_views = views.size();
  std::vector<Eigen::MatrixXd> proj(n_views);
  for (std::size_t v = 0; v < n_views; ++v) proj[v] = project_view(model, views, v, confounds);

  SyncReport report;
  report.entries.reserve(static_cast<std::size_t>(model.k));
  for (int j = 0; j < model.k; ++j) {
    IscEntry entry;
    entry.component = j;
    entry.per_pair.reserve(n_views * (n_views - 1) / 2);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_views; ++i) {
      for (std::size_t jj = i + 1; jj < n_views; ++jj) {
        const double r = linalg::pearson(proj[i].col(j), proj[jj].col(j));
        entry.per_pair.push_back(r);
        acc += r;
      }
    }
    entry.isc = acc / static_cast<double>(entry.per_pair.size());
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace attndec::gcca
