#include "attndec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "attndec/errors.hpp"

namespace attndec::stats {

TimeSeries phase_scramble(const TimeSeries& series, Rng& rng) {
  series.validate_shape("phase_scramble");
  const Eigen::Index t_len = series.samples();
  TimeSeries out = series;
  if (t_len < 2) return out;

  Eigen::FFT<double> fft;
  const double two_pi = 6.283185307179586476925286766559;
  std::vector<std::complex<double>> freq(static_cast<std::size_t>(t_len));
  std::vector<std::complex<double>> time(static_cast<std::size_t>(t_len));

  for (Eigen::Index c = 0; c < series.channels(); ++c) {
    for (Eigen::Index t = 0; t < t_len; ++t)
      time[static_cast<std::size_t>(t)] = std::complex<double>(series.data(t, c), 0.0);
    fft.fwd(freq, time);
    // randomize phases of strictly positive frequencies below Nyquist,
    // mirror into the negative half; DC (and Nyquist when T is even) stay real
    const Eigen::Index half = t_len / 2;
    for (Eigen::Index k = 1; k < half + (t_len % 2); ++k) {
      if (k == half && t_len % 2 == 0) break;
      const double mag = std::abs(freq[static_cast<std::size_t>(k)]);
      const double phase = rng.uniform(0.0, two_pi);
      const std::complex<double> v = std::polar(mag, phase);
      freq[static_cast<std::size_t>(k)] = v;
      freq[static_cast<std::size_t>(t_len - k)] = std::conj(v);
    }
    fft.inv(time, freq);
    for (Eigen::Index t = 0; t < t_len; ++t)
      out.data(t, c) = time[static_cast<std::size_t>(t)].real();
  }
  return out;
}

NullDistribution null_corr(const std::function<double(const TimeSeries&, const TimeSeries&)>& eval_fn,
                           const TimeSeries& x, const TimeSeries& y, int n, Rng& rng) {
  if (!eval_fn) throw invalid_argument("null_corr: missing evaluation function");
  if (n < 1) throw invalid_argument("null_corr: n must be positive");
  x.validate_shape("null_corr x");
  y.validate_shape("null_corr y");
  NullDistribution null;
  null.generator = "phase_scramble";
  null.values.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const TimeSeries y_scrambled = phase_scramble(y, rng);
    null.values.push_back(eval_fn(x, y_scrambled));
  }
  return null;
}

NullDistribution null_accuracy_circular(const std::function<double(int)>& decode_fn,
                                        int n_trials, int n, Rng& rng) {
  if (!decode_fn) throw invalid_argument("null_accuracy_circular: missing decode function");
  if (n_trials < 2) throw invalid_argument("null_accuracy_circular: needs at least two trials");
  if (n < 1) throw invalid_argument("null_accuracy_circular: n must be positive");
  NullDistribution null;
  null.generator = "circular_shift";
  null.values.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int shift = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_trials - 1)));
    null.values.push_back(decode_fn(shift));
  }
  return null;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double p_value(double observed, const NullDistribution& null) {
  if (null.values.empty()) throw invalid_argument("p_value: empty null distribution");
  const double med = median_of(null.values);
  const double dev = std::abs(observed - med);
  std::size_t count = 0;
  for (double v : null.values) {
    if (std::abs(v - med) >= dev) ++count;
  }
  const std::size_t n = null.values.size();
  return static_cast<double>(std::max<std::size_t>(count, 1)) / static_cast<double>(n);
}

double significance_threshold(const NullDistribution& null, double alpha) {
  if (null.values.empty()) throw invalid_argument("significance_threshold: empty null distribution");
  if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_argument("significance_threshold: alpha out of (0, 1)");
  std::vector<double> v = null.values;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 1) return v[0];
  const double q = 1.0 - alpha / 2.0;
  const double h = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= n) return v[n - 1];
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                    Alternative alternative) {
  if (a.size() != b.size()) throw invalid_argument("wilcoxon_signed_rank: length mismatch");
  if (a.empty()) throw invalid_argument("wilcoxon_signed_rank: empty input");

  std::vector<double> diff;
  diff.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }
  if (diff.empty()) throw invalid_argument("wilcoxon_signed_rank: all differences are zero");
  const int n = static_cast<int>(diff.size());
  if (n < 5) throw invalid_argument("wilcoxon_signed_rank: fewer than 5 non-zero differences");

  // average ranks of |diff|, ties mid-ranked
  std::vector<int> order(diff.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(diff[static_cast<std::size_t>(i)]) < std::abs(diff[static_cast<std::size_t>(j)]);
  });
  std::vector<double> rank(diff.size(), 0.0);
  std::vector<int> tie_sizes;
  {
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      const double v = std::abs(diff[static_cast<std::size_t>(order[i])]);
      while (j + 1 < order.size() && std::abs(diff[static_cast<std::size_t>(order[j + 1])]) == v) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based mid-rank
      for (std::size_t k = i; k <= j; ++k) rank[static_cast<std::size_t>(order[k])] = avg;
      tie_sizes.push_back(static_cast<int>(j - i + 1));
      i = j + 1;
    }
  }

  double w_pos = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (diff[i] > 0.0) w_pos += rank[i];
  }

  WilcoxonResult res;
  res.w = w_pos;
  res.n_effective = n;

  if (n <= 20) {
    // exact: every sign assignment is equally likely under the null
    res.exact = true;
    const std::uint64_t total = 1ULL << n;
    std::uint64_t count_ge = 0, count_le = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double w = 0.0;
      for (int i = 0; i < n; ++i) {
        if (mask & (1ULL << i)) w += rank[static_cast<std::size_t>(i)];
      }
      if (w >= w_pos) ++count_ge;
      if (w <= w_pos) ++count_le;
    }
    const double p_greater = static_cast<double>(count_ge) / static_cast<double>(total);
    const double p_less = static_cast<double>(count_le) / static_cast<double>(total);
    switch (alternative) {
      case Alternative::greater: res.p = p_greater; break;
      case Alternative::less: res.p = p_less; break;
      case Alternative::two_sided: res.p = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
    }
  } else {
    res.exact = false;
    const double dn = static_cast<double>(n);
    const double mu = dn * (dn + 1.0) / 4.0;
    double tie_term = 0.0;
    for (int t : tie_sizes) {
      const double dt = static_cast<double>(t);
      tie_term += dt * dt * dt - dt;
    }
    const double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) throw numeric_degeneracy("wilcoxon_signed_rank: zero variance under the null");
    const double sigma = std::sqrt(var);
    const double p_greater = 1.0 - normal_cdf((w_pos - mu - 0.5) / sigma);
    const double p_less = normal_cdf((w_pos - mu + 0.5) / sigma);
    switch (alternative) {
      case Alternative::greater: res.p = p_greater; break;
      case Alternative::less: res.p = p_less; break;
      case Alternative::two_sided: res.p = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
    }
  }
  return res;
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
  if (p_values.empty()) throw invalid_argument("bh_adjust: empty input");
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw invalid_argument("bh_adjust: p-value outside [0, 1]");
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (p_values[i] != p_values[j]) return p_values[i] < p_values[j];
    return i < j;
  });
  std::vector<double> adjusted(m, 0.0);
  double running_min = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    const double scaled = p_values[order[i]] * static_cast<double>(m) / static_cast<double>(i + 1);
    running_min = std::min(running_min, std::min(scaled, 1.0));
    adjusted[order[i]] = running_min;
  }
  return adjusted;
}

}  // namespace attndec::stats
