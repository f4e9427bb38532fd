// Stimulus and gaze feature extraction: eye velocity, object-level optical
// flow energy, block-matching motion estimation, zero-phase filtering,
// anti-aliased downsampling, blink interpolation, and saccade masking.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "attndec/types.hpp"

namespace attndec::features {

// Gaze coordinate trace with annotated blink intervals and saccade onsets.
struct GazeTrace {
  TimeSeries coords;                                          // T x 2 (a, b)
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blinks;  // [start, end) sample ranges
  std::vector<Eigen::Index> saccade_onsets;                   // sample indices
};

struct FlowFrame {
  Eigen::MatrixXd vx;  // H x W, horizontal displacement in pixels/frame
  Eigen::MatrixXd vy;  // H x W, vertical displacement
};

struct FlowField {
  std::vector<FlowFrame> frames;
  double frame_rate = 0.0;
};

struct ObjectMask {
  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> frames;  // H x W each
  std::string object_id;
};

// Sample-to-sample gaze speed: v(t) = hypot(a(t)-a(t-1), b(t)-b(t-1)), v(0)=0.
TimeSeries eye_velocity(const TimeSeries& coords);

// Horizontal/vertical bipolar derivation of a 4-channel periocular montage
// (left, right, above, below): horizontal = left - right, vertical = above - below.
TimeSeries bipolar_eog(const TimeSeries& eog);

// Mean optical-flow magnitude over the object's mask, one value per frame.
TimeSeries obj_flow(const FlowField& flow, const ObjectMask& mask);

// Dense block-matching motion estimation between consecutive grayscale
// frames: per block, the displacement within [-search, search]^2 minimizing
// the sum of absolute differences, ties broken toward zero displacement.
// The final frame copies the previous field so counts match the input.
FlowField block_flow(const std::vector<Eigen::MatrixXd>& frames, int block, int search,
                     double frame_rate);

// Forward-backward FIR filtering with reflection padding: zero phase delay,
// magnitude response |H(f)|^2.
TimeSeries zero_phase_filter(const TimeSeries& series, const std::vector<double>& kernel);

// Integer-factor decimation preceded by a zero-phase anti-aliasing low-pass
// cut at 0.8x the new Nyquist. factor == 1 returns the input unchanged.
TimeSeries downsample(const TimeSeries& series, int factor);

// Linear interpolation across blink intervals; a blink touching the series
// boundary is held at the nearest valid sample. Returns a trace with the
// blink list cleared.
GazeTrace interpolate_blinks(const GazeTrace& trace);

// Generic interval interpolation used by interpolate_blinks.
TimeSeries interpolate_intervals(const TimeSeries& series,
                                 const std::vector<std::pair<Eigen::Index, Eigen::Index>>& intervals);

// Keep-mask that removes a window around each saccade onset, from pre_s
// before to post_s after (inclusive, rounded to samples), windows unioned.
std::vector<bool> saccade_mask(const std::vector<Eigen::Index>& onsets, double rate,
                               Eigen::Index n_samples, double pre_s = 0.33, double post_s = 1.0);

// Hamming-windowed sinc low-pass prototype, unit DC gain. cutoff_hz is the
// -6 dB edge of the single-pass response; taps must be odd.
std::vector<double> lowpass_kernel(double cutoff_hz, double rate, int taps);

}  // namespace attndec::features
