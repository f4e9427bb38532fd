#include "attndec/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "attndec/errors.hpp"

namespace attndec::features {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TimeSeries eye_velocity(const TimeSeries& coords) {
  coords.validate_shape();
  if (coords.channels() != 2) {
    throw invalid_argument("eye_velocity: expected 2 coordinate channels, got " +
                           std::to_string(coords.channels()));
  }
  const Index t = coords.samples();
  MatrixXd v(t, 1);
  v(0, 0) = 0.0;
  for (Index i = 1; i < t; ++i) {
    v(i, 0) = std::hypot(coords.data(i, 0) - coords.data(i - 1, 0),
                         coords.data(i, 1) - coords.data(i - 1, 1));
  }
  TimeSeries out;
  out.data = std::move(v);
  out.rate = coords.rate;
  out.labels = {"velocity"};
  return out;
}

TimeSeries bipolar_eog(const TimeSeries& eog) {
  eog.validate_shape();
  if (eog.channels() != 4) {
    throw invalid_argument("bipolar_eog: expected 4 channels (left, right, above, below), got " +
                           std::to_string(eog.channels()));
  }
  MatrixXd d(eog.samples(), 2);
  d.col(0) = eog.data.col(0) - eog.data.col(1);
  d.col(1) = eog.data.col(2) - eog.data.col(3);
  TimeSeries out;
  out.data = std::move(d);
  out.rate = eog.rate;
  out.labels = {"eog_h", "eog_v"};
  return out;
}

TimeSeries obj_flow(const FlowField& flow, const ObjectMask& mask) {
  if (flow.frames.empty()) throw invalid_argument("obj_flow: empty flow field");
  if (flow.frames.size() != mask.frames.size()) {
    throw invalid_argument("obj_flow: flow has " + std::to_string(flow.frames.size()) +
                           " frames but mask has " + std::to_string(mask.frames.size()));
  }
  const Index f_count = static_cast<Index>(flow.frames.size());
  MatrixXd out(f_count, 1);
  for (Index f = 0; f < f_count; ++f) {
    const FlowFrame& fr = flow.frames[static_cast<size_t>(f)];
    const auto& m = mask.frames[static_cast<size_t>(f)];
    if (fr.vx.rows() != m.rows() || fr.vx.cols() != m.cols() || fr.vy.rows() != m.rows() ||
        fr.vy.cols() != m.cols()) {
      throw invalid_argument("obj_flow: frame " + std::to_string(f) +
                             " mask/flow dimensions disagree");
    }
    double sum = 0.0;
    Index count = 0;
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) {
        if (m(r, c)) {
          sum += std::hypot(fr.vx(r, c), fr.vy(r, c));
          ++count;
        }
      }
    }
    if (count == 0) {
      throw invalid_argument("obj_flow: mask for frame " + std::to_string(f) +
                             " selects no pixels");
    }
    out(f, 0) = sum / static_cast<double>(count);
  }
  TimeSeries series;
  series.data = std::move(out);
  series.rate = flow.frame_rate;
  series.labels = {mask.object_id.empty() ? std::string("objflow") : mask.object_id};
  return series;
}

namespace {

double block_sad(const MatrixXd& a, const MatrixXd& b, Index ay, Index ax, Index by, Index bx,
                 Index h, Index w) {
  double s = 0.0;
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < w; ++c) {
      s += std::abs(a(ay + r, ax + c) - b(by + r, bx + c));
    }
  }
  return s;
}

}  // namespace

FlowField block_flow(const std::vector<MatrixXd>& frames, int block, int search,
                     double frame_rate) {
  if (frames.size() < 2) throw invalid_argument("block_flow: need at least 2 frames");
  if (block < 1) throw invalid_argument("block_flow: block size must be positive");
  if (search < 0) throw invalid_argument("block_flow: search radius must be non-negative");
  const Index h = frames[0].rows();
  const Index w = frames[0].cols();
  if (h < block || w < block) {
    throw invalid_argument("block_flow: frame " + std::to_string(h) + "x" + std::to_string(w) +
                           " smaller than block size " + std::to_string(block));
  }
  for (size_t f = 1; f < frames.size(); ++f) {
    if (frames[f].rows() != h || frames[f].cols() != w) {
      throw invalid_argument("block_flow: frame " + std::to_string(f) +
                             " dimensions differ from frame 0");
    }
  }

  FlowField field;
  field.frame_rate = frame_rate;
  field.frames.reserve(frames.size());
  for (size_t f = 0; f + 1 < frames.size(); ++f) {
    const MatrixXd& cur = frames[f];
    const MatrixXd& nxt = frames[f + 1];
    FlowFrame fr;
    fr.vx = MatrixXd::Zero(h, w);
    fr.vy = MatrixXd::Zero(h, w);
    for (Index by = 0; by < h; by += block) {
      for (Index bx = 0; bx < w; bx += block) {
        const Index bh = std::min<Index>(block, h - by);
        const Index bw = std::min<Index>(block, w - bx);
        // Best candidate ordered by (SAD, displacement norm, dy, dx) so the
        // result is deterministic and favors small motion on flat regions.
        double best_sad = std::numeric_limits<double>::infinity();
        std::tuple<double, Index, Index> best_key{0.0, 0, 0};
        Index best_dy = 0;
        Index best_dx = 0;
        bool have = false;
        for (Index dy = -search; dy <= search; ++dy) {
          for (Index dx = -search; dx <= search; ++dx) {
            const Index ty = by + dy;
            const Index tx = bx + dx;
            if (ty < 0 || tx < 0 || ty + bh > h || tx + bw > w) continue;
            const double sad = block_sad(cur, nxt, by, bx, ty, tx, bh, bw);
            const std::tuple<double, Index, Index> key{
                static_cast<double>(dy * dy + dx * dx), dy, dx};
            if (!have || sad < best_sad || (sad == best_sad && key < best_key)) {
              have = true;
              best_sad = sad;
              best_key = key;
              best_dy = dy;
              best_dx = dx;
            }
          }
        }
        fr.vx.block(by, bx, bh, bw).setConstant(static_cast<double>(best_dx));
        fr.vy.block(by, bx, bh, bw).setConstant(static_cast<double>(best_dy));
      }
    }
    field.frames.push_back(std::move(fr));
  }
  // Duplicate the final field so every input frame has a flow sample.
  field.frames.push_back(field.frames.back());
  return field;
}

namespace {

// Reflected sample lookup: index -1 maps to 1, index T maps to T-2.
inline Index reflect(Index i, Index t) {
  if (i < 0) i = -i;
  if (i >= t) i = 2 * (t - 1) - i;
  return i;
}

}  // namespace

TimeSeries zero_phase_filter(const TimeSeries& series, const std::vector<double>& kernel) {
  series.validate_shape();
  if (kernel.empty()) throw invalid_argument("zero_phase_filter: empty kernel");
  const Index t = series.samples();
  const Index m = static_cast<Index>(kernel.size());
  if (m > t) {
    throw invalid_argument("zero_phase_filter: kernel of length " + std::to_string(m) +
                           " longer than series of length " + std::to_string(t));
  }
  // Forward-backward FIR == single correlation with the kernel's
  // autocorrelation g (length 2m-1), applied with reflection padding.
  std::vector<double> g(static_cast<size_t>(2 * m - 1), 0.0);
  for (Index lag = -(m - 1); lag <= m - 1; ++lag) {
    double s = 0.0;
    for (Index i = 0; i < m; ++i) {
      const Index j = i + lag;
      if (j >= 0 && j < m) s += kernel[static_cast<size_t>(i)] * kernel[static_cast<size_t>(j)];
    }
    g[static_cast<size_t>(lag + m - 1)] = s;
  }

  TimeSeries out = series;
  const Index d = series.channels();
  for (Index c = 0; c < d; ++c) {
    for (Index i = 0; i < t; ++i) {
      double acc = 0.0;
      for (Index lag = -(m - 1); lag <= m - 1; ++lag) {
        acc += g[static_cast<size_t>(lag + m - 1)] * series.data(reflect(i + lag, t), c);
      }
      out.data(i, c) = acc;
    }
  }
  return out;
}

std::vector<double> lowpass_kernel(double cutoff_hz, double rate, int taps) {
  if (rate <= 0.0) throw invalid_argument("lowpass_kernel: rate must be positive");
  if (cutoff_hz <= 0.0 || cutoff_hz >= rate / 2.0) {
    throw invalid_argument("lowpass_kernel: cutoff must lie in (0, rate/2)");
  }
  if (taps < 3 || taps % 2 == 0) {
    throw invalid_argument("lowpass_kernel: taps must be odd and >= 3");
  }
  const double fc = cutoff_hz / rate;  // cycles per sample
  const int c = (taps - 1) / 2;
  std::vector<double> h(static_cast<size_t>(taps));
  double sum = 0.0;
  for (int k = 0; k < taps; ++k) {
    const double x = 2.0 * fc * (k - c);
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double win =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / static_cast<double>(taps - 1));
    h[static_cast<size_t>(k)] = 2.0 * fc * sinc * win;
    sum += h[static_cast<size_t>(k)];
  }
  for (double& v : h) v /= sum;  // unit DC gain
  return h;
}

TimeSeries downsample(const TimeSeries& series, int factor) {
  series.validate_shape();
  if (factor < 1) throw invalid_argument("downsample: factor must be >= 1");
  if (factor == 1) return series;
  const int taps = 8 * factor + 1;
  // Cut at 0.8x the post-decimation Nyquist: 0.4 * (rate/factor) Hz.
  const std::vector<double> h = lowpass_kernel(0.4 * series.rate / factor, series.rate, taps);
  const TimeSeries filtered = zero_phase_filter(series, h);
  const Index t = series.samples();
  const Index n_out = (t + factor - 1) / factor;
  TimeSeries out;
  out.data.resize(n_out, series.channels());
  for (Index i = 0; i < n_out; ++i) out.data.row(i) = filtered.data.row(i * factor);
  out.rate = series.rate / factor;
  out.labels = series.labels;
  return out;
}

TimeSeries interpolate_intervals(
    const TimeSeries& series,
    const std::vector<std::pair<Index, Index>>& intervals) {
  series.validate_shape();
  const Index t = series.samples();
  std::vector<std::pair<Index, Index>> sorted = intervals;
  for (const auto& [s, e] : sorted) {
    if (s < 0 || e > t || s >= e) {
      throw invalid_argument("interpolate_intervals: interval [" + std::to_string(s) + ", " +
                             std::to_string(e) + ") out of range for " + std::to_string(t) +
                             " samples");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  // Merge overlapping or touching intervals so anchors are valid samples.
  std::vector<std::pair<Index, Index>> merged;
  for (const auto& iv : sorted) {
    if (!merged.empty() && iv.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }

  TimeSeries out = series;
  for (const auto& [s, e] : merged) {
    const bool have_left = s > 0;
    const bool have_right = e < t;
    for (Index c = 0; c < series.channels(); ++c) {
      if (have_left && have_right) {
        const double v0 = series.data(s - 1, c);
        const double v1 = series.data(e, c);
        const double span = static_cast<double>(e - (s - 1));
        for (Index i = s; i < e; ++i) {
          out.data(i, c) = v0 + (v1 - v0) * static_cast<double>(i - (s - 1)) / span;
        }
      } else if (have_right) {
        for (Index i = s; i < e; ++i) out.data(i, c) = series.data(e, c);
      } else if (have_left) {
        for (Index i = s; i < e; ++i) out.data(i, c) = series.data(s - 1, c);
      }
      // An interval covering the whole series has no anchors; leave it as-is.
    }
  }
  return out;
}

GazeTrace interpolate_blinks(const GazeTrace& trace) {
  GazeTrace out;
  out.coords = interpolate_intervals(trace.coords, trace.blinks);
  out.saccade_onsets = trace.saccade_onsets;
  return out;
}

std::vector<bool> saccade_mask(const std::vector<Index>& onsets, double rate, Index n_samples,
                               double pre_s, double post_s) {
  if (rate <= 0.0) throw invalid_argument("saccade_mask: rate must be positive");
  if (n_samples < 1) throw invalid_argument("saccade_mask: need at least one sample");
  if (pre_s < 0.0 || post_s < 0.0) {
    throw invalid_argument("saccade_mask: window extents must be non-negative");
  }
  const Index pre = static_cast<Index>(std::lround(pre_s * rate));
  const Index post = static_cast<Index>(std::lround(post_s * rate));
  std::vector<bool> keep(static_cast<size_t>(n_samples), true);
  for (const Index onset : onsets) {
    if (onset < 0 || onset >= n_samples) {
      throw invalid_argument("saccade_mask: onset " + std::to_string(onset) +
                             " outside [0, " + std::to_string(n_samples) + ")");
    }
    const Index lo = std::max<Index>(0, onset - pre);
    const Index hi = std::min<Index>(n_samples - 1, onset + post);
    for (Index i = lo; i <= hi; ++i) keep[static_cast<size_t>(i)] = false;
  }
  return keep;
}

}  // namespace attndec::features
