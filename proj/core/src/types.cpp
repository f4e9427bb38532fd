#include "attndec/types.hpp"

#include <unordered_set>

#include "attndec/errors.hpp"

namespace attndec {

void TimeSeries::validate_shape(const char* what) const {
  const std::string w(what);
  if (data.rows() < 1 || data.cols() < 1)
    throw invalid_argument(w + ": needs at least one sample and one channel");
  if (!(rate > 0.0)) throw invalid_argument(w + ": sampling rate must be positive");
  if (static_cast<Eigen::Index>(labels.size()) != data.cols())
    throw invalid_argument(w + ": label count does not match channel count");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw invalid_argument(w + ": duplicate channel label '" + l + "'");
  }
}

void TimeSeries::validate(const char* what) const {
  validate_shape(what);
  if (!data.allFinite()) throw invalid_argument(std::string(what) + ": non-finite sample value");
}

TimeSeries TimeSeries::slice(Eigen::Index start, Eigen::Index len) const {
  if (start < 0 || len < 1 || start + len > data.rows())
    throw invalid_argument("slice: window out of range");
  TimeSeries out;
  out.data = data.middleRows(start, len);
  out.rate = rate;
  out.labels = labels;
  return out;
}

TimeSeries make_series(Eigen::MatrixXd data, double rate, const std::string& prefix) {
  TimeSeries s;
  s.rate = rate;
  const Eigen::Index d = data.cols();
  s.labels.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index c = 0; c < d; ++c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%02d", prefix.c_str(), static_cast<int>(c + 1));
    s.labels.emplace_back(buf);
  }
  s.data = std::move(data);
  return s;
}

LagSpec LagSpec::centered(int n) {
  if (n < 1 || n % 2 == 0) throw invalid_argument("LagSpec::centered: n must be odd and positive");
  std::vector<int> o;
  o.reserve(static_cast<std::size_t>(n));
  for (int i = -(n - 1) / 2; i <= (n - 1) / 2; ++i) o.push_back(i);
  return LagSpec(std::move(o));
}

LagSpec LagSpec::past(int n) {
  if (n < 1) throw invalid_argument("LagSpec::past: n must be positive");
  std::vector<int> o;
  o.reserve(static_cast<std::size_t>(n));
  for (int i = -(n - 1); i <= 0; ++i) o.push_back(i);
  return LagSpec(std::move(o));
}

void LagSpec::validate(const char* what) const {
  const std::string w(what);
  if (offsets.empty()) throw invalid_argument(w + ": needs at least one offset");
  for (std::size_t i = 1; i < offsets.size(); ++i) {
    if (offsets[i] <= offsets[i - 1]) throw invalid_argument(w + ": offsets must be strictly increasing");
  }
}

}  // namespace attndec
