// Group analysis across N synchronized views (MAXVAR generalized CCA): one
// decoder per view, a shared subspace, and inter-view correlation (ISC) of
// the per-view projections. Solved as a block generalized eigenproblem on the
// full N x N block covariance against its block-diagonal part.
//
// Note on eigenvalues: the block matrix keeps its diagonal blocks, so a
// component whose pairwise correlations average to r has eigenvalue close to
// 1 + (N - 1) * r. Lambda is not itself a correlation; use isc() for that.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "attndec/cca.hpp"
#include "attndec/linalg.hpp"
#include "attndec/types.hpp"

namespace attndec::gcca {

// Lags applied to every view: {-2..2}, slightly wider than the two-view
// decoder default to absorb small response-latency differences between views.
LagSpec default_view_lags();

struct GccaModel {
  std::vector<Eigen::MatrixXd> decoders;  // per view, (D_n * L) x K
  LagSpec lag;
  int k = 0;
  std::vector<int> n_channels;            // per view
  std::vector<std::string> view_labels;   // per view, informational
  std::vector<double> train_isc;          // per component, on the fit window
  std::vector<double> train_scale;        // per-column norm of the raw shared subspace

  bool has_confounds = false;             // set by fit_gcca_partial
  LagSpec lag_c;
  std::vector<int> n_channels_c;          // per view
};

struct IscEntry {
  int component = 0;             // zero-based
  double isc = 0.0;              // mean over the per-pair correlations
  std::vector<double> per_pair;  // pairs (i, j), i < j, in row-major order
};

struct SyncReport {
  std::vector<IscEntry> entries;  // one per component
  std::string fold_id;
};

GccaModel fit_gcca(const std::vector<TimeSeries>& views, const LagSpec& lag, int k,
                   double ridge = linalg::kDefaultRidge);

// Multi-recording fit: records[r][n] is view n of recording r. Each recording
// is centered and embedded separately; covariances pool all embedded rows.
GccaModel fit_gcca_segments(const std::vector<std::vector<TimeSeries>>& records,
                            const LagSpec& lag, int k, double ridge = linalg::kDefaultRidge);

// Partial variant: per-view confounds are regressed out of the matching view
// (and recorded in the model so evaluation residualizes identically).
GccaModel fit_gcca_partial(const std::vector<TimeSeries>& views,
                           const std::vector<cca::ConfoundSet>& confounds, const LagSpec& lag,
                           int k, double ridge = linalg::kDefaultRidge);

GccaModel fit_gcca_partial_segments(const std::vector<std::vector<TimeSeries>>& records,
                                    const std::vector<std::vector<cca::ConfoundSet>>& confounds,
                                    const LagSpec& lag, int k,
                                    double ridge = linalg::kDefaultRidge);

// Shared subspace S = sum_n X_n W_n over the given window, each column scaled
// by its raw norm so the orthonormality constraint S^T S = I_K holds exactly
// on the diagonal (and to solver precision off it when evaluated on the fit
// window). A zero-variance column is a degeneracy error.
Eigen::MatrixXd shared_subspace(const GccaModel& model, const std::vector<TimeSeries>& views,
                                const std::vector<cca::ConfoundSet>* confounds = nullptr);

// Projection of one view onto the model's components over the given window
// (T x K), after centering and, for a partial fit, residualization against
// that view's confounds (required then, rejected otherwise).
Eigen::MatrixXd view_projection(const GccaModel& model, const TimeSeries& view, int view_index,
                                const cca::ConfoundSet* confound = nullptr);

// ISC of one component: mean pairwise Pearson correlation of the per-view
// projections, 2 / (N (N - 1)) * sum_{i<j} corr(X_i w_i, X_j w_j).
IscEntry isc(const GccaModel& model, const std::vector<TimeSeries>& views, int component,
             const std::vector<cca::ConfoundSet>* confounds = nullptr);

// All components at once.
SyncReport sync_report(const GccaModel& model, const std::vector<TimeSeries>& views,
                       const std::vector<cca::ConfoundSet>* confounds = nullptr);

}  // namespace attndec::gcca
