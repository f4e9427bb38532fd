// Forward-model simulator: attention-modulated synthetic multi-modal
// recordings with known ground truth, used as the oracle for end-to-end
// validation of the decoding pipeline.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "attndec/decoding.hpp"
#include "attndec/io.hpp"
#include "attndec/rng.hpp"
#include "attndec/types.hpp"

namespace attndec::simulate {

struct SimConfig {
  int n_subjects = 19;
  int n_pairs = 7;
  double trial_seconds = 120.0;
  double rate = 30.0;
  int n_channels = 64;               // uses the first n labels of the 64-channel cap
  double attended_gain = 1.0;        // g_a
  double unattended_gain = 0.25;     // g_u
  double confound_gain = 0.0;        // eye-velocity leakage into the data channels
  double noise_color = 1.0;          // spectral exponent: noise PSD ~ 1/f^alpha
  double snr_db = 0.0;               // deterministic-signal power over noise power
  int response_kernel_length = 15;   // samples (~0.5 s at 30 Hz)
  double distractor_switch_rate = 0.0;  // per-second rate of attention lapses to the distractor
  std::map<std::string, double> region_localization;  // channel label -> response weight
  std::uint64_t seed = 0;

  void validate() const;
};

// Typed parse of a flat key-value config; unknown keys are hard errors.
// region_focus/region_focus_gain/region_background_gain expand to a full
// region_localization map over the default region table.
SimConfig sim_config_from_kv(io::KeyValueConfig& kv);

// Per-subject forward model: smooth FIR responses to the attended and
// unattended feature (correlated across the two), response topographies,
// and a front-weighted eye-artifact topography.
struct SubjectModel {
  Eigen::VectorXd h_att;    // kernel, response_kernel_length taps, causal
  Eigen::VectorXd h_unatt;
  Eigen::VectorXd topo_att;  // n_channels
  Eigen::VectorXd topo_unatt;
  Eigen::VectorXd topo_eye;
};

SubjectModel gen_subject_model(const SimConfig& config, Rng& rng);

// Nonnegative, unit-variance, low-pass (-3 dB near rate/10) univariate
// feature series standing in for an object's frame-level motion energy.
TimeSeries gen_feature(double duration_s, double rate, Rng& rng);

// Ground truth retained for audits and reconstruction tests.
struct TrialTruth {
  int subject_id = 0;
  int pair_id = 0;
  int presentation = 0;
  int attended_object = 0;
  TimeSeries latent_att;    // (h_att * f_attended), before gain and topography
  TimeSeries latent_unatt;  // (h_unatt * f_unattended)
  TimeSeries confound;      // standardized gaze speed injected into the data channels
  double signal_power = 0.0;
  double noise_power = 0.0;
  double switch_fraction = 0.0;  // fraction of samples spent attending the distractor
};

struct SubjectTruth {
  int subject_id = 0;
  SubjectModel model;
};

struct GroundTruth {
  std::vector<SubjectTruth> subjects;
  std::vector<TrialTruth> trials;  // aligned with the generated records
};

struct TrialOut {
  decoding::TrialRecord record;
  TrialTruth truth;
};

// One presentation: data channels = g_a * (h_att * f_att) topo_att^T
// + g_u * (h_unatt * f_unatt) topo_unatt^T + confound_gain * v_gaze topo_eye^T
// + colored noise scaled to snr_db. Gaze is a saccade/pursuit synthesis whose
// dynamics follow the attended feature; EOG mixes gaze velocity with noise;
// SACC marks saccade onsets.
TrialOut gen_subject_trial(const std::array<TimeSeries, 2>& features, int attended,
                           const SimConfig& config, const SubjectModel& model, int subject_id,
                           int pair_id, int presentation, Rng& rng);

struct SimOutput {
  std::vector<decoding::TrialRecord> records;  // subject-major, pair, presentation order
  GroundTruth truth;
};

// In-memory dataset: every subject sees every pair twice with the attended
// object swapped between presentations. Fully determined by config.seed.
SimOutput gen_records(const SimConfig& config);

// On-disk dataset: manifest + per-trial matrix files + a ground-truth audit
// file (ground_truth/audit.json) that the decoding path never reads.
// Returns the manifest path.
std::string gen_dataset(const SimConfig& config, const std::string& out_dir);

}  // namespace attndec::simulate
