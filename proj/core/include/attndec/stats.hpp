// Permutation statistics: phase-scrambled and circular-shift null
// distributions, empirical p-values and significance thresholds, the Wilcoxon
// signed-rank test, and Benjamini-Hochberg adjustment.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "attndec/rng.hpp"
#include "attndec/types.hpp"

namespace attndec::stats {

inline constexpr int kDefaultSurrogates = 500;   // phase-scramble draws per fold
inline constexpr int kDefaultNullShifts = 100;   // circular shifts per subject
inline constexpr double kDefaultAlpha = 0.05;    // two-tailed -> 97.5th percentile

struct NullDistribution {
  std::vector<double> values;
  std::string generator;  // "phase_scramble" or "circular_shift"
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(values.size()); }
};

// Surrogate series with the same per-channel magnitude spectrum as the input
// but uniformly random phases. DC and (for even length) Nyquist bins are kept
// real, so the per-channel mean is preserved and the output is real-valued.
TimeSeries phase_scramble(const TimeSeries& series, Rng& rng);

// Null distribution of a correlation statistic: phase-scramble y n times and
// re-evaluate. eval_fn receives the untouched x and the surrogate y; callers
// choose whether it re-fits a model or evaluates a frozen one.
NullDistribution null_corr(const std::function<double(const TimeSeries&, const TimeSeries&)>& eval_fn,
                           const TimeSeries& x, const TimeSeries& y, int n, Rng& rng);
inline NullDistribution null_corr(const std::function<double(const TimeSeries&, const TimeSeries&)>& eval_fn,
                                  const TimeSeries& x, const TimeSeries& y, Rng& rng) {
  return null_corr(eval_fn, x, y, kDefaultSurrogates, rng);
}

// Null distribution of a decoding accuracy: draw n random non-zero circular
// shifts of the test trial sequence (length n_trials) and re-decode with the
// trial-to-feature pairing rotated by each shift.
NullDistribution null_accuracy_circular(const std::function<double(int)>& decode_fn,
                                        int n_trials, int n, Rng& rng);
inline NullDistribution null_accuracy_circular(const std::function<double(int)>& decode_fn,
                                               int n_trials, Rng& rng) {
  return null_accuracy_circular(decode_fn, n_trials, kDefaultNullShifts, rng);
}

// Two-tailed empirical p-value around the null median:
// p = #{ |v_i - median| >= |observed - median| } / n, bounded below by 1/n.
double p_value(double observed, const NullDistribution& null);

// Empirical (1 - alpha/2) quantile of the null with linear interpolation
// between order statistics (alpha = 0.05 -> 97.5th percentile).
double significance_threshold(const NullDistribution& null, double alpha = kDefaultAlpha);

enum class Alternative { two_sided, greater, less };

struct WilcoxonResult {
  double w = 0.0;       // sum of ranks of positive differences
  int n_effective = 0;  // pairs remaining after dropping zero differences
  double p = 1.0;
  bool exact = false;   // true when the full 2^n enumeration was used
};

// Paired signed-rank test on a - b. Zero differences are dropped; ties in
// |difference| get average ranks. n <= 20 uses the exact 2^n distribution,
// larger n a normal approximation with tie and continuity corrections.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                    Alternative alternative = Alternative::two_sided);

// Benjamini-Hochberg step-up adjustment; output is aligned with the input.
std::vector<double> bh_adjust(const std::vector<double>& p_values);

}  // namespace attndec::stats
