// Dense linear-algebra primitives: centering, time-lag embedding, covariance
// estimation with ridge loading, confound regression, and the symmetric
// generalized eigendecomposition that the correlation models are built on.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "attndec/types.hpp"

namespace attndec::linalg {

// Per-channel mean removal.
TimeSeries center(const TimeSeries& series);

// Time-lag embedding. Output has the same row count T and D*L columns, where
// L = spec.size(). Column o_idx*D + c of row t holds channel c at sample
// t + offsets[o_idx]; positions outside [0, T) are zero-filled.
Eigen::MatrixXd lag_embed(const TimeSeries& series, const LagSpec& spec);
Eigen::MatrixXd lag_embed(const Eigen::MatrixXd& data, const LagSpec& spec);

// Sample covariance blocks of two embedded matrices with matching rows.
// R_xy = X^T Y / (T - 1); the diagonal blocks get a relative ridge
// ridge * mean(diag) * I so they are positive definite.
struct CovarianceSet {
  Eigen::MatrixXd r_xx;
  Eigen::MatrixXd r_yy;
  Eigen::MatrixXd r_xy;
};

inline constexpr double kDefaultRidge = 1e-8;

CovarianceSet covariance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                         double ridge = kDefaultRidge);

// Least-squares removal of confound columns: X - C (C^T C)^+ C^T X.
// The pseudo-inverse drops eigenvalues of C^T C below 1e-10 times the largest,
// so rank-deficient confounds (including all-zero ones) are handled exactly.
Eigen::MatrixXd regress_out(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c);

// Pseudo-inverse of a symmetric PSD matrix with a relative eigenvalue cutoff.
Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& m, double rel_cutoff = 1e-10);

// Symmetric-definite generalized eigendecomposition A v = lambda B v.
// B is whitened through its own eigendecomposition (not a Cholesky factor) so
// a non-positive-definite B surfaces as a diagnosable error naming the matrix.
// Returns the K largest eigenvalues in descending order; eigenvectors are
// B-orthonormal: V^T B V = I_K.
struct Gevd {
  Eigen::VectorXd values;   // K, descending
  Eigen::MatrixXd vectors;  // n x K
};

Gevd sym_gevd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int k,
              const char* b_name = "B");

// Pearson correlation with the zero-variance rule: if either input has zero
// variance the correlation is defined as 0 (no evidence) rather than NaN.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Row indices whose full lag window lies within kept samples. keep has one
// flag per sample; a row survives iff every in-range offset position is kept.
// Used to estimate covariances over kept data only, skipping windows that
// straddle removed runs (e.g. saccade gaps).
std::vector<Eigen::Index> mask_lag_rows(const std::vector<bool>& keep, const LagSpec& spec);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows);

}  // namespace attndec::linalg
