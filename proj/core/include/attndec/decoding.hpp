// Experiment engine: trial records, leave-one-pair-out cross-validation,
// bootstrap segment sampling, attended-vs-unattended and match-mismatch
// decisions, channel-region subsetting, modality fusion, and the full
// per-subject decoding run with permutation nulls.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "attndec/cca.hpp"
#include "attndec/regions.hpp"
#include "attndec/rng.hpp"
#include "attndec/stats.hpp"
#include "attndec/types.hpp"

namespace attndec::decoding {

// One presentation of one video pair for one subject. Every modality and
// both object features share the record's rate and sample count.
struct TrialRecord {
  int subject_id = 0;
  int pair_id = 0;          // 1-based
  int presentation = 0;     // 1 or 2
  int attended_object = 0;  // 1 or 2; the other object is the distractor
  std::map<std::string, TimeSeries> modalities;  // EEG, EOG, GAZE, SACC, GAZE_V, EOG_V
  std::array<TimeSeries, 2> features;            // object 1, object 2

  const TimeSeries& modality(const std::string& name) const;
  const TimeSeries& attended_feature() const;
  const TimeSeries& unattended_feature() const;
  double duration_s() const;
  // Shared rate/length across modalities and features, labels in {1,2};
  // violations raise invalid_dataset naming the record.
  void validate() const;
};

enum class Task { svad, mm };
enum class ConfoundMode { none, regress };

Task task_from_string(const std::string& name);          // "svad" | "mm"
const char* to_string(Task task);

struct DecodeConfig {
  Task task = Task::svad;
  double segment_seconds = 30.0;
  LagSpec lag_data = cca::default_data_lags();
  LagSpec lag_stimulus = cca::default_stimulus_lags();
  LagSpec lag_confound = cca::default_data_lags();
  int k = cca::kDefaultComponents;
  int sum_components = cca::kDefaultSumComponents;
  double ridge = linalg::kDefaultRidge;
  std::uint64_t seed = 0;
  ConfoundMode confound_mode = ConfoundMode::none;
  std::string region = "whole";  // "whole" or a key of region_map
  regions::RegionMap region_map = regions::default_regions();
  std::string modality = "EEG";
  bool combine_gaze_v = false;   // append rescaled gaze velocity to the data stream
  int n_null_shifts = stats::kDefaultNullShifts;  // circular-shift null size per subject; 0 disables
  int n_surrogates = stats::kDefaultSurrogates;   // phase-scramble null size per fold; 0 disables
  int workers = 0;                                // 0 = available parallelism

  void validate() const;
};

// One leave-one-pair-out fold: test = every record of one pair (both
// presentations, all subjects present in the input), train = the rest.
struct Fold {
  int pair_id = 0;
  std::vector<const TrialRecord*> train;
  std::vector<const TrialRecord*> test;
};

// Folds ordered by pair id. Every (subject, pair) must contribute both
// presentations with opposite attended objects.
std::vector<Fold> loo_pair_split(const std::vector<TrialRecord>& records);

// floor(test_len_s / 3) segment start offsets (seconds), uniform over
// [0, test_len_s - segment_s], drawn with replacement.
std::vector<double> bootstrap_segments(double test_len_s, double segment_s, Rng& rng);

// Slice [start_s, start_s + len_s) by sample arithmetic at the series rate.
TimeSeries segment_slice(const TimeSeries& series, double start_s, double len_s);

struct Decision {
  bool target_chosen = false;  // exact tie counts against the decoder
  double score_target = 0.0;
  double score_imposter = 0.0;
};

// Sum of the first m standardized-projection correlations of a cached pair;
// components flagged not-ok on either side contribute zero.
double projection_score(const cca::StandardizedProjection& zx,
                        const cca::StandardizedProjection& zy, int m);

// Score the segment against both candidate features and pick the higher
// correlation sum (tie -> imposter).
Decision decide_trial(const cca::CcaModel& model, const TimeSeries& data_seg,
                      const TimeSeries& feat_target, const TimeSeries& feat_imposter, int m,
                      const cca::ConfoundSet* confounds = nullptr);

// A same-length attended-feature segment drawn uniformly from the test set,
// excluding any start whose span overlaps the current segment (for the same
// record, |start - target_start| >= segment_s).
struct MismatchDraw {
  TimeSeries segment;
  int record_index = 0;  // position within test_records
  double start_s = 0.0;
};
MismatchDraw mismatch_sampler(const std::vector<const TrialRecord*>& test_records,
                              int target_record, double target_start_s, double segment_s,
                              Rng& rng);

// The named region's channels in map order; unknown region or absent channel
// is an error.
TimeSeries channel_subset(const TimeSeries& series, const std::string& region,
                          const regions::RegionMap& map);

// Append gaze velocity as one extra channel, rescaled to the median
// per-channel standard deviation of the data block (zero-variance velocity
// is appended as zeros).
TimeSeries combine_modalities(const TimeSeries& data, const TimeSeries& gaze_v);

struct FoldResult {
  int subject_id = 0;
  int pair_id = 0;
  bool failed = false;
  std::string error;  // set when failed
  int n_trials = 0;
  int n_correct = 0;
  std::vector<double> train_corrs;
  double corr_observed = 0.0;        // mean correlation sum over the fold's test records
  double corr_null_threshold = 0.0;  // 97.5th percentile of the fold's surrogate null
  double corr_p = 1.0;
  std::vector<double> corr_null;     // surrogate correlation sums (size n_surrogates)
  std::vector<int> null_correct;     // per circular shift draw: correct-trial count

  double accuracy() const {
    return n_trials > 0 ? static_cast<double>(n_correct) / n_trials : 0.0;
  }
};

struct TrialDecision {
  int subject_id = 0;
  int pair_id = 0;
  int presentation = 0;
  int segment_index = 0;
  double start_s = 0.0;
  double score_target = 0.0;
  double score_imposter = 0.0;
  bool correct = false;
};

struct SubjectSummary {
  int subject_id = 0;
  int n_trials = 0;
  int n_correct = 0;
  double accuracy = 0.0;
  std::vector<double> null_values;  // circular-shift accuracies pooled over folds
  double null_mean = 0.0;
  double null_threshold = 0.0;
  double p = 1.0;
};

struct DecodeReport {
  std::string task_name;
  std::string modality;
  std::string region;
  bool confounds_regressed = false;
  bool combined_gaze_v = false;
  double segment_seconds = 0.0;
  std::uint64_t seed = 0;
  int k = 0;
  int sum_components = 0;
  std::vector<FoldResult> folds;        // subject-major, pair-minor order
  std::vector<TrialDecision> decisions;
  std::vector<SubjectSummary> subjects;
  std::vector<double> pooled_null;      // all subjects' null accuracies concatenated
  double mean_accuracy = 0.0;           // mean of per-subject accuracies
  double pooled_null_mean = 0.0;
  double pooled_null_threshold = 0.0;
  int n_failed_folds = 0;
};

// Full protocol: per subject, leave-one-pair-out folds; per fold, fit on the
// training records' data-vs-attended-feature streams, decide bootstrap
// segments against the unattended feature (svad) or a mismatch draw (mm),
// then build circular-shift and phase-scramble nulls. A numerically failed
// fold is recorded and skipped, not fatal. Output is reproducible
// bit-for-bit for a fixed (records, config) across worker counts.
DecodeReport run_task(const std::vector<TrialRecord>& records, const DecodeConfig& config);

}  // namespace attndec::decoding
