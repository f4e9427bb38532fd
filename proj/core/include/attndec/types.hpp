// Core containers: multichannel time series and lag specifications.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace attndec {

// Uniformly sampled multichannel series, samples in rows, channels in columns.
struct TimeSeries {
  Eigen::MatrixXd data;             // T x D
  double rate = 0.0;                // samples per second
  std::vector<std::string> labels;  // D channel names, distinct

  TimeSeries() = default;
  TimeSeries(Eigen::MatrixXd d, double r, std::vector<std::string> l)
      : data(std::move(d)), rate(r), labels(std::move(l)) {}

  Eigen::Index samples() const { return data.rows(); }
  Eigen::Index channels() const { return data.cols(); }
  double duration_s() const { return rate > 0.0 ? static_cast<double>(data.rows()) / rate : 0.0; }

  // Cheap structural checks: shape, rate, label count/uniqueness.
  void validate_shape(const char* what = "series") const;
  // Full check: shape plus finiteness of every entry. O(T*D), use at boundaries.
  void validate(const char* what = "series") const;

  // Rows [start, start+len), same rate and labels.
  TimeSeries slice(Eigen::Index start, Eigen::Index len) const;
};

// Convenience: series with synthesized labels "ch01", "ch02", ...
TimeSeries make_series(Eigen::MatrixXd data, double rate, const std::string& prefix = "ch");

// Set of sample offsets used for time-lag embedding. Offsets are strictly
// increasing; negative offsets reach into the past relative to the output row.
struct LagSpec {
  std::vector<int> offsets;

  LagSpec() : offsets{0} {}
  explicit LagSpec(std::vector<int> o) : offsets(std::move(o)) {}

  // n offsets centered on zero: {-(n-1)/2, ..., 0, ..., (n-1)/2}; n odd
  static LagSpec centered(int n);
  // n offsets ending at zero: {-(n-1), ..., -1, 0}
  static LagSpec past(int n);

  int size() const { return static_cast<int>(offsets.size()); }
  void validate(const char* what = "lag spec") const;
};

}  // namespace attndec
