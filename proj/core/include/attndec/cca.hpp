// Stimulus-informed canonical correlation analysis between a multichannel
// data stream and a stimulus feature, with an optional confound-regression
// variant. The model is fit as a single symmetric-definite generalized
// eigenproblem on the joint covariance blocks after time-lag embedding.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "attndec/linalg.hpp"
#include "attndec/types.hpp"

namespace attndec::cca {

inline constexpr int kDefaultComponents = 5;     // decoder components kept
inline constexpr int kDefaultSumComponents = 2;  // components summed for decisions

// Encoder lags for the stimulus feature: {-14..0} at 30 Hz reaches half a
// second into the past of the response.
LagSpec default_stimulus_lags();
// Decoder lags for the data stream: {-1, 0, 1}.
LagSpec default_data_lags();

// Confounds aligned sample-by-sample with the data they are regressed out of.
struct ConfoundSet {
  TimeSeries series;
  LagSpec lag_c;
};

struct CcaModel {
  Eigen::MatrixXd w_x;  // (D_x * L_x) x K
  Eigen::MatrixXd w_y;  // (D_y * L_y) x K
  LagSpec lag_x;
  LagSpec lag_y;
  int n_channels_x = 0;
  int n_channels_y = 0;
  int k = 0;
  std::vector<double> train_corrs;  // per component, non-increasing
  std::vector<int> sign_flips;      // +-1 applied to each w_y column at fit time

  // set by fit_pcca: evaluation must residualize against the same confound layout
  bool has_confounds = false;
  LagSpec lag_c;
  int n_channels_c = 0;
};

// Fit on one training stream pair.
CcaModel fit_cca(const TimeSeries& x, const TimeSeries& y, const LagSpec& lag_x,
                 const LagSpec& lag_y, int k, double ridge = linalg::kDefaultRidge);

// Fit on several recordings: each is centered and lag-embedded separately so
// no lag window straddles a recording boundary, then the covariance is
// estimated over all embedded rows pooled together.
CcaModel fit_cca_segments(const std::vector<TimeSeries>& xs, const std::vector<TimeSeries>& ys,
                          const LagSpec& lag_x, const LagSpec& lag_y, int k,
                          double ridge = linalg::kDefaultRidge);

// Partial CCA: lag-embedded confounds are regressed out of both embedded views
// before the covariance step. The model records the confound layout so that
// evaluation applies the identical residualization to held-out data.
CcaModel fit_pcca(const TimeSeries& x, const TimeSeries& y, const ConfoundSet& confounds,
                  const LagSpec& lag_x, const LagSpec& lag_y, int k,
                  double ridge = linalg::kDefaultRidge);

CcaModel fit_pcca_segments(const std::vector<TimeSeries>& xs, const std::vector<TimeSeries>& ys,
                           const std::vector<ConfoundSet>& confounds, const LagSpec& lag_x,
                           const LagSpec& lag_y, int k, double ridge = linalg::kDefaultRidge);

// Per-component Pearson correlations of the projected test pair. The segment
// is centered before embedding; a model fit with confounds requires a
// confound segment covering the same samples.
std::vector<double> evaluate(const CcaModel& model, const TimeSeries& x, const TimeSeries& y);
std::vector<double> evaluate(const CcaModel& model, const TimeSeries& x, const TimeSeries& y,
                             const ConfoundSet& confounds);

// Sum of the first m per-component correlations, raw (negative values are not
// clipped; they count as evidence against).
double correlation_sum(const std::vector<double>& corrs, int m = kDefaultSumComponents);

// Standardized per-component projections of one side of a pair (zero mean,
// unit norm per column). A column whose variation is at rounding level
// relative to the segment's magnitude — a constant or railed input — is left
// as zeros and flagged; evaluate() reports 0 for such a component, so the
// inner product of two standardized columns always equals the Pearson
// correlation evaluate() would report, which lets the decoding engine re-pair
// cached segments cheaply when building permutation nulls.
struct StandardizedProjection {
  Eigen::MatrixXd z;        // T x K
  std::vector<bool> ok;     // per component: false if the projection was dead
};

StandardizedProjection project_x(const CcaModel& model, const TimeSeries& x,
                                 const ConfoundSet* confounds = nullptr);
StandardizedProjection project_y(const CcaModel& model, const TimeSeries& y,
                                 const ConfoundSet* confounds = nullptr);

}  // namespace attndec::cca
