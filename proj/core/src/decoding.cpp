#include "attndec/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "attndec/errors.hpp"
#include "attndec/parallel.hpp"

namespace attndec::decoding {

using Eigen::Index;

namespace {

// Seed-derivation stream tags.
constexpr std::uint64_t kTagSegments = 0x736567;    // bootstrap starts, per (subject, pair, presentation)
constexpr std::uint64_t kTagMismatch = 0x6d6d;      // mismatch draws, per (subject, pair, presentation)
constexpr std::uint64_t kTagShift = 0x736866;       // circular-shift null, per (subject, pair)
constexpr std::uint64_t kTagSurrogate = 0x737572;   // phase-scramble null, per (subject, pair, presentation)

}  // namespace

const TimeSeries& TrialRecord::modality(const std::string& name) const {
  const auto it = modalities.find(name);
  if (it == modalities.end()) {
    throw invalid_argument("record subject=" + std::to_string(subject_id) +
                           " pair=" + std::to_string(pair_id) + " has no modality '" + name +
                           "'");
  }
  return it->second;
}

const TimeSeries& TrialRecord::attended_feature() const {
  return features[static_cast<size_t>(attended_object - 1)];
}

const TimeSeries& TrialRecord::unattended_feature() const {
  return features[static_cast<size_t>(2 - attended_object)];
}

double TrialRecord::duration_s() const { return features[0].duration_s(); }

void TrialRecord::validate() const {
  const std::string where = "record subject=" + std::to_string(subject_id) +
                            " pair=" + std::to_string(pair_id) +
                            " presentation=" + std::to_string(presentation);
  if (attended_object != 1 && attended_object != 2) {
    throw invalid_dataset(where + ": attended_object must be 1 or 2");
  }
  if (presentation != 1 && presentation != 2) {
    throw invalid_dataset(where + ": presentation must be 1 or 2");
  }
  if (modalities.empty()) throw invalid_dataset(where + ": no modalities");
  const TimeSeries& ref = modalities.begin()->second;
  const auto check = [&](const std::string& name, const TimeSeries& series) {
    try {
      series.validate_shape();
    } catch (const std::exception& e) {
      throw invalid_dataset(where + " " + name + ": " + e.what());
    }
    if (series.rate != ref.rate || series.samples() != ref.samples()) {
      throw invalid_dataset(where + " " + name + ": rate/length differs from other streams");
    }
  };
  for (const auto& [name, series] : modalities) check(name, series);
  check("feature 1", features[0]);
  check("feature 2", features[1]);
}

Task task_from_string(const std::string& name) {
  if (name == "svad") return Task::svad;
  if (name == "mm") return Task::mm;
  throw invalid_argument("unknown task '" + name + "' (expected svad or mm)");
}

const char* to_string(Task task) { return task == Task::svad ? "svad" : "mm"; }

void DecodeConfig::validate() const {
  if (segment_seconds <= 0.0) throw invalid_argument("decode config: segment_seconds must be positive");
  if (k < 1) throw invalid_argument("decode config: k must be >= 1");
  if (sum_components < 1 || sum_components > k) {
    throw invalid_argument("decode config: sum_components must be in [1, k]");
  }
  if (ridge < 0.0) throw invalid_argument("decode config: ridge must be non-negative");
  if (n_null_shifts < 0 || n_surrogates < 0) {
    throw invalid_argument("decode config: null sizes must be non-negative");
  }
  lag_data.validate();
  lag_stimulus.validate();
  lag_confound.validate();
  if (region != "whole" && !region_map.count(region)) {
    throw invalid_argument("decode config: unknown region '" + region + "'");
  }
}

std::vector<Fold> loo_pair_split(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw invalid_dataset("no records to split");
  // Every (subject, pair) must contribute presentations {1, 2} with opposite
  // attended objects.
  std::map<std::pair<int, int>, std::map<int, int>> seen;
  for (const TrialRecord& rec : records) {
    auto& pres = seen[{rec.subject_id, rec.pair_id}];
    if (pres.count(rec.presentation)) {
      throw invalid_dataset("duplicate presentation " + std::to_string(rec.presentation) +
                            " for subject " + std::to_string(rec.subject_id) + " pair " +
                            std::to_string(rec.pair_id));
    }
    pres[rec.presentation] = rec.attended_object;
  }
  for (const auto& [key, pres] : seen) {
    const std::string where =
        "subject " + std::to_string(key.first) + " pair " + std::to_string(key.second);
    if (pres.size() != 2 || !pres.count(1) || !pres.count(2)) {
      throw invalid_dataset(where + " is missing a presentation");
    }
    if (pres.at(1) == pres.at(2)) {
      throw invalid_dataset(where + " attends the same object in both presentations");
    }
  }

  std::set<int> pair_ids;
  for (const TrialRecord& rec : records) pair_ids.insert(rec.pair_id);
  std::vector<Fold> folds;
  folds.reserve(pair_ids.size());
  for (const int pair : pair_ids) {
    Fold fold;
    fold.pair_id = pair;
    for (const TrialRecord& rec : records) {
      (rec.pair_id == pair ? fold.test : fold.train).push_back(&rec);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

std::vector<double> bootstrap_segments(double test_len_s, double segment_s, Rng& rng) {
  if (segment_s <= 0.0) throw invalid_argument("bootstrap_segments: segment length must be positive");
  if (test_len_s < segment_s) {
    throw invalid_argument("bootstrap_segments: test span of " + std::to_string(test_len_s) +
                           " s is shorter than a " + std::to_string(segment_s) + " s segment");
  }
  const int n = static_cast<int>(std::floor(test_len_s / 3.0));
  std::vector<double> starts(static_cast<size_t>(n));
  const double span = test_len_s - segment_s;
  for (int i = 0; i < n; ++i) starts[static_cast<size_t>(i)] = rng.uniform(0.0, span);
  return starts;
}

TimeSeries segment_slice(const TimeSeries& series, double start_s, double len_s) {
  const Index n = static_cast<Index>(std::llround(len_s * series.rate));
  Index start = static_cast<Index>(std::llround(start_s * series.rate));
  start = std::clamp<Index>(start, 0, std::max<Index>(0, series.samples() - n));
  return series.slice(start, n);
}

double projection_score(const cca::StandardizedProjection& zx,
                        const cca::StandardizedProjection& zy, int m) {
  const int k = static_cast<int>(zx.z.cols());
  m = std::min(m, k);
  double score = 0.0;
  for (int c = 0; c < m; ++c) {
    if (!zx.ok[static_cast<size_t>(c)] || !zy.ok[static_cast<size_t>(c)]) continue;
    score += zx.z.col(c).dot(zy.z.col(c));
  }
  return score;
}

Decision decide_trial(const cca::CcaModel& model, const TimeSeries& data_seg,
                      const TimeSeries& feat_target, const TimeSeries& feat_imposter, int m,
                      const cca::ConfoundSet* confounds) {
  if (feat_target.samples() != data_seg.samples() ||
      feat_imposter.samples() != data_seg.samples()) {
    throw invalid_argument("decide_trial: segments must have equal length");
  }
  const cca::StandardizedProjection zx = cca::project_x(model, data_seg, confounds);
  const cca::StandardizedProjection zt = cca::project_y(model, feat_target, confounds);
  const cca::StandardizedProjection zi = cca::project_y(model, feat_imposter, confounds);
  Decision decision;
  decision.score_target = projection_score(zx, zt, m);
  decision.score_imposter = projection_score(zx, zi, m);
  decision.target_chosen = decision.score_target > decision.score_imposter;
  return decision;
}

MismatchDraw mismatch_sampler(const std::vector<const TrialRecord*>& test_records,
                              int target_record, double target_start_s, double segment_s,
                              Rng& rng) {
  if (test_records.empty()) throw invalid_argument("mismatch_sampler: empty test set");
  if (target_record < 0 || target_record >= static_cast<int>(test_records.size())) {
    throw invalid_argument("mismatch_sampler: target record index out of range");
  }
  // Feasible start intervals per record; within the target's own record a
  // start must stay a full segment length away so spans never overlap.
  struct Interval {
    int record;
    double lo, hi;  // [lo, hi], hi >= lo
  };
  std::vector<Interval> feasible;
  double total = 0.0;
  for (int r = 0; r < static_cast<int>(test_records.size()); ++r) {
    const double len = test_records[static_cast<size_t>(r)]->duration_s();
    const double max_start = len - segment_s;
    if (max_start < 0.0) continue;
    if (r != target_record) {
      feasible.push_back({r, 0.0, max_start});
      total += max_start;
    } else {
      const double left_hi = std::min(max_start, target_start_s - segment_s);
      if (left_hi >= 0.0) {
        feasible.push_back({r, 0.0, left_hi});
        total += left_hi;
      }
      const double right_lo = target_start_s + segment_s;
      if (right_lo <= max_start) {
        feasible.push_back({r, right_lo, max_start});
        total += max_start - right_lo;
      }
    }
  }
  if (feasible.empty() || total <= 0.0) {
    throw invalid_argument("mismatch_sampler: no feasible non-overlapping position");
  }
  double u = rng.uniform(0.0, total);
  for (const Interval& iv : feasible) {
    const double width = iv.hi - iv.lo;
    if (u <= width || &iv == &feasible.back()) {
      const double start = std::min(iv.lo + u, iv.hi);
      MismatchDraw draw;
      draw.record_index = iv.record;
      draw.start_s = start;
      draw.segment = segment_slice(
          test_records[static_cast<size_t>(iv.record)]->attended_feature(), start, segment_s);
      return draw;
    }
    u -= width;
  }
  throw invalid_argument("mismatch_sampler: sampling failed");  // unreachable
}

TimeSeries channel_subset(const TimeSeries& series, const std::string& region,
                          const regions::RegionMap& map) {
  const auto it = map.find(region);
  if (it == map.end()) throw invalid_argument("unknown region '" + region + "'");
  const std::vector<Index> idx = regions::channel_indices(series.labels, it->second);
  TimeSeries out;
  out.data.resize(series.samples(), static_cast<Index>(idx.size()));
  out.labels.reserve(idx.size());
  for (size_t c = 0; c < idx.size(); ++c) {
    out.data.col(static_cast<Index>(c)) = series.data.col(idx[c]);
    out.labels.push_back(series.labels[static_cast<size_t>(idx[c])]);
  }
  out.rate = series.rate;
  return out;
}

TimeSeries combine_modalities(const TimeSeries& data, const TimeSeries& gaze_v) {
  if (data.rate != gaze_v.rate) {
    throw invalid_argument("combine_modalities: rate mismatch");
  }
  if (data.samples() != gaze_v.samples()) {
    throw invalid_argument("combine_modalities: length mismatch");
  }
  if (gaze_v.channels() != 1) {
    throw invalid_argument("combine_modalities: expected a 1-channel velocity series");
  }
  // Scale the appended channel to the median per-channel std of the block.
  std::vector<double> stds;
  stds.reserve(static_cast<size_t>(data.channels()));
  for (Index c = 0; c < data.channels(); ++c) {
    const double mean = data.data.col(c).mean();
    stds.push_back(std::sqrt((data.data.col(c).array() - mean).square().mean()));
  }
  std::vector<double> sorted = stds;
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  const double median_std =
      n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const double v_mean = gaze_v.data.col(0).mean();
  const double v_std = std::sqrt((gaze_v.data.col(0).array() - v_mean).square().mean());

  TimeSeries out;
  out.data.resize(data.samples(), data.channels() + 1);
  out.data.leftCols(data.channels()) = data.data;
  if (v_std > 0.0) {
    out.data.col(data.channels()) = gaze_v.data.col(0) * (median_std / v_std);
  } else {
    out.data.col(data.channels()).setZero();
  }
  out.rate = data.rate;
  out.labels = data.labels;
  out.labels.push_back(gaze_v.labels.empty() ? std::string("velocity") : gaze_v.labels[0]);
  return out;
}

namespace {

// Data stream for one record under the active configuration: modality pick,
// region subset, optional velocity channel.
TimeSeries prepare_data(const TrialRecord& rec, const DecodeConfig& config) {
  TimeSeries x = rec.modality(config.modality);
  if (config.region != "whole") x = channel_subset(x, config.region, config.region_map);
  if (config.combine_gaze_v) x = combine_modalities(x, rec.modality("GAZE_V"));
  return x;
}

// Confound stream: periocular channels plus gaze speed, channel-concatenated.
TimeSeries prepare_confounds(const TrialRecord& rec) {
  const TimeSeries& eog = rec.modality("EOG");
  const TimeSeries& gaze_v = rec.modality("GAZE_V");
  TimeSeries out;
  out.data.resize(eog.samples(), eog.channels() + gaze_v.channels());
  out.data.leftCols(eog.channels()) = eog.data;
  out.data.rightCols(gaze_v.channels()) = gaze_v.data;
  out.rate = eog.rate;
  out.labels = eog.labels;
  out.labels.insert(out.labels.end(), gaze_v.labels.begin(), gaze_v.labels.end());
  return out;
}

struct TrialCache {
  cca::StandardizedProjection zx;  // data segment
  cca::StandardizedProjection zt;  // target feature segment
  cca::StandardizedProjection zi;  // imposter feature segment
};

struct FoldTask {
  int subject_id = 0;
  const Fold* fold = nullptr;
};

struct FoldOutput {
  FoldResult result;
  std::vector<TrialDecision> decisions;
};

FoldOutput run_fold(const FoldTask& task, const DecodeConfig& config) {
  FoldOutput out;
  FoldResult& fr = out.result;
  fr.subject_id = task.subject_id;
  fr.pair_id = task.fold->pair_id;

  const bool use_confounds = config.confound_mode == ConfoundMode::regress;

  cca::CcaModel model;
  try {
    std::vector<TimeSeries> xs, ys;
    std::vector<cca::ConfoundSet> cs;
    for (const TrialRecord* rec : task.fold->train) {
      xs.push_back(prepare_data(*rec, config));
      ys.push_back(rec->attended_feature());
      if (use_confounds) cs.push_back({prepare_confounds(*rec), config.lag_confound});
    }
    // Keep the component count feasible for the embedded dimensions.
    const Index dx = xs.front().channels() * static_cast<Index>(config.lag_data.offsets.size());
    const Index dy = static_cast<Index>(config.lag_stimulus.offsets.size());
    const int k = std::min<int>(config.k, static_cast<int>(std::min(dx, dy)));
    if (use_confounds) {
      model = cca::fit_pcca_segments(xs, ys, cs, config.lag_data, config.lag_stimulus, k,
                                     config.ridge);
    } else {
      model = cca::fit_cca_segments(xs, ys, config.lag_data, config.lag_stimulus, k, config.ridge);
    }
  } catch (const std::exception& e) {
    fr.failed = true;
    fr.error = e.what();
    return out;
  }
  fr.train_corrs = model.train_corrs;
  const int m = std::min(config.sum_components, model.k);

  // ---- bootstrap trials ----
  std::vector<TrialCache> caches;
  try {
    for (const TrialRecord* rec : task.fold->test) {
      const TimeSeries x = prepare_data(*rec, config);
      const TimeSeries confound_stream = use_confounds ? prepare_confounds(*rec) : TimeSeries{};
      Rng seg_rng = Rng::derived(
          config.seed, {kTagSegments, static_cast<std::uint64_t>(task.subject_id),
                        static_cast<std::uint64_t>(task.fold->pair_id),
                        static_cast<std::uint64_t>(rec->presentation)});
      Rng mm_rng = Rng::derived(
          config.seed, {kTagMismatch, static_cast<std::uint64_t>(task.subject_id),
                        static_cast<std::uint64_t>(task.fold->pair_id),
                        static_cast<std::uint64_t>(rec->presentation)});
      const std::vector<double> starts =
          bootstrap_segments(rec->duration_s(), config.segment_seconds, seg_rng);
      const int record_index =
          static_cast<int>(std::find(task.fold->test.begin(), task.fold->test.end(), rec) -
                           task.fold->test.begin());
      for (size_t si = 0; si < starts.size(); ++si) {
        const double start = starts[si];
        const TimeSeries x_seg = segment_slice(x, start, config.segment_seconds);
        const TimeSeries t_seg =
            segment_slice(rec->attended_feature(), start, config.segment_seconds);
        TimeSeries i_seg;
        if (config.task == Task::svad) {
          i_seg = segment_slice(rec->unattended_feature(), start, config.segment_seconds);
        } else {
          i_seg = mismatch_sampler(task.fold->test, record_index, start, config.segment_seconds,
                                   mm_rng)
                      .segment;
        }
        cca::ConfoundSet c_seg;
        const cca::ConfoundSet* c_ptr = nullptr;
        if (use_confounds) {
          c_seg.series = segment_slice(confound_stream, start, config.segment_seconds);
          c_seg.lag_c = config.lag_confound;
          c_ptr = &c_seg;
        }

        TrialCache cache;
        cache.zx = cca::project_x(model, x_seg, c_ptr);
        cache.zt = cca::project_y(model, t_seg, c_ptr);
        cache.zi = cca::project_y(model, i_seg, c_ptr);

        TrialDecision td;
        td.subject_id = task.subject_id;
        td.pair_id = task.fold->pair_id;
        td.presentation = rec->presentation;
        td.segment_index = static_cast<int>(si);
        td.start_s = start;
        td.score_target = projection_score(cache.zx, cache.zt, m);
        td.score_imposter = projection_score(cache.zx, cache.zi, m);
        td.correct = td.score_target > td.score_imposter;  // tie counts as wrong
        ++fr.n_trials;
        if (td.correct) ++fr.n_correct;
        out.decisions.push_back(td);
        caches.push_back(std::move(cache));
      }
    }
  } catch (const std::exception& e) {
    fr.failed = true;
    fr.error = e.what();
    out.decisions.clear();
    fr.n_trials = 0;
    fr.n_correct = 0;
    return out;
  }

  // ---- circular-shift accuracy null ----
  if (config.n_null_shifts > 0 && fr.n_trials >= 2) {
    const int n_trials = fr.n_trials;
    const auto decode_shifted = [&](int shift) {
      int correct = 0;
      for (int j = 0; j < n_trials; ++j) {
        const TrialCache& data_cache = caches[static_cast<size_t>(j)];
        const TrialCache& feat_cache = caches[static_cast<size_t>((j + shift) % n_trials)];
        const double st = projection_score(data_cache.zx, feat_cache.zt, m);
        const double si = projection_score(data_cache.zx, feat_cache.zi, m);
        if (st > si) ++correct;
      }
      return static_cast<double>(correct) / static_cast<double>(n_trials);
    };
    Rng shift_rng = Rng::derived(config.seed,
                                 {kTagShift, static_cast<std::uint64_t>(task.subject_id),
                                  static_cast<std::uint64_t>(task.fold->pair_id)});
    const stats::NullDistribution null = stats::null_accuracy_circular(
        decode_shifted, n_trials, config.n_null_shifts, shift_rng);
    fr.null_correct.reserve(null.values.size());
    for (const double acc : null.values) {
      fr.null_correct.push_back(static_cast<int>(std::lround(acc * n_trials)));
    }
  }

  // ---- fold-level correlation and its phase-scramble null ----
  {
    std::vector<std::vector<double>> record_nulls;
    double obs_sum = 0.0;
    int obs_count = 0;
    for (const TrialRecord* rec : task.fold->test) {
      const TimeSeries x = prepare_data(*rec, config);
      cca::ConfoundSet confound_set;
      const cca::ConfoundSet* c_ptr = nullptr;
      if (use_confounds) {
        confound_set.series = prepare_confounds(*rec);
        confound_set.lag_c = config.lag_confound;
        c_ptr = &confound_set;
      }
      const cca::StandardizedProjection zx = cca::project_x(model, x, c_ptr);
      const auto eval_record = [&](const TimeSeries&, const TimeSeries& y) {
        return projection_score(zx, cca::project_y(model, y, c_ptr), m);
      };
      obs_sum += eval_record(x, rec->attended_feature());
      ++obs_count;
      if (config.n_surrogates > 0) {
        Rng surro_rng = Rng::derived(
            config.seed, {kTagSurrogate, static_cast<std::uint64_t>(task.subject_id),
                          static_cast<std::uint64_t>(task.fold->pair_id),
                          static_cast<std::uint64_t>(rec->presentation)});
        const stats::NullDistribution null = stats::null_corr(
            eval_record, x, rec->attended_feature(), config.n_surrogates, surro_rng);
        record_nulls.push_back(null.values);
      }
    }
    fr.corr_observed = obs_count > 0 ? obs_sum / obs_count : 0.0;
    if (!record_nulls.empty()) {
      // Element-wise mean across the fold's records: the null of the
      // fold-mean statistic, one value per surrogate draw.
      stats::NullDistribution fold_null;
      fold_null.generator = "phase_scramble";
      fold_null.values.assign(record_nulls[0].size(), 0.0);
      for (const std::vector<double>& values : record_nulls) {
        for (size_t i = 0; i < values.size(); ++i) fold_null.values[i] += values[i];
      }
      for (double& v : fold_null.values) v /= static_cast<double>(record_nulls.size());
      fr.corr_null = fold_null.values;
      fr.corr_null_threshold = stats::significance_threshold(fold_null);
      fr.corr_p = stats::p_value(fr.corr_observed, fold_null);
    }
  }

  return out;
}

}  // namespace

DecodeReport run_task(const std::vector<TrialRecord>& records, const DecodeConfig& config) {
  config.validate();
  if (records.empty()) throw invalid_dataset("run_task: no records");

  // Group per subject, preserving subject order by id.
  std::map<int, std::vector<TrialRecord>> by_subject;
  for (const TrialRecord& rec : records) by_subject[rec.subject_id].push_back(rec);

  // Per-subject folds (materialized up front so tasks can run in parallel).
  std::vector<std::pair<int, std::vector<Fold>>> subject_folds;
  subject_folds.reserve(by_subject.size());
  for (const auto& [subject_id, subject_records] : by_subject) {
    subject_folds.emplace_back(subject_id, loo_pair_split(subject_records));
  }

  std::vector<FoldTask> tasks;
  for (const auto& [subject_id, folds] : subject_folds) {
    for (const Fold& fold : folds) tasks.push_back({subject_id, &fold});
  }

  std::vector<FoldOutput> outputs(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), config.workers,
               [&](int i) { outputs[static_cast<size_t>(i)] = run_fold(tasks[static_cast<size_t>(i)], config); });

  DecodeReport report;
  report.task_name = to_string(config.task);
  report.modality = config.modality;
  report.region = config.region;
  report.confounds_regressed = config.confound_mode == ConfoundMode::regress;
  report.combined_gaze_v = config.combine_gaze_v;
  report.segment_seconds = config.segment_seconds;
  report.seed = config.seed;
  report.k = config.k;
  report.sum_components = config.sum_components;

  for (FoldOutput& out : outputs) {
    if (out.result.failed) ++report.n_failed_folds;
    report.folds.push_back(std::move(out.result));
    report.decisions.insert(report.decisions.end(), out.decisions.begin(), out.decisions.end());
  }

  // Per-subject pooling: accuracy over all fold trials; null accuracies pool
  // fold draws index-by-index, weighted by fold trial counts.
  double accuracy_sum = 0.0;
  int subjects_with_trials = 0;
  for (const auto& [subject_id, folds] : subject_folds) {
    SubjectSummary summary;
    summary.subject_id = subject_id;
    std::vector<int> null_correct;
    int null_trials = 0;
    for (const FoldResult& fr : report.folds) {
      if (fr.subject_id != subject_id || fr.failed) continue;
      summary.n_trials += fr.n_trials;
      summary.n_correct += fr.n_correct;
      if (!fr.null_correct.empty()) {
        if (null_correct.empty()) null_correct.assign(fr.null_correct.size(), 0);
        for (size_t i = 0; i < fr.null_correct.size(); ++i) null_correct[i] += fr.null_correct[i];
        null_trials += fr.n_trials;
      }
    }
    if (summary.n_trials > 0) {
      summary.accuracy = static_cast<double>(summary.n_correct) / summary.n_trials;
      accuracy_sum += summary.accuracy;
      ++subjects_with_trials;
    }
    if (!null_correct.empty() && null_trials > 0) {
      summary.null_values.reserve(null_correct.size());
      for (const int c : null_correct) {
        summary.null_values.push_back(static_cast<double>(c) / null_trials);
      }
      stats::NullDistribution null;
      null.generator = "circular_shift";
      null.values = summary.null_values;
      summary.null_mean =
          std::accumulate(null.values.begin(), null.values.end(), 0.0) / null.values.size();
      summary.null_threshold = stats::significance_threshold(null);
      summary.p = stats::p_value(summary.accuracy, null);
      report.pooled_null.insert(report.pooled_null.end(), summary.null_values.begin(),
                                summary.null_values.end());
    }
    report.subjects.push_back(std::move(summary));
  }
  report.mean_accuracy = subjects_with_trials > 0 ? accuracy_sum / subjects_with_trials : 0.0;
  if (!report.pooled_null.empty()) {
    stats::NullDistribution pooled;
    pooled.generator = "circular_shift";
    pooled.values = report.pooled_null;
    report.pooled_null_mean =
        std::accumulate(pooled.values.begin(), pooled.values.end(), 0.0) / pooled.values.size();
    report.pooled_null_threshold = stats::significance_threshold(pooled);
  }
  return report;
}

}  // namespace attndec::decoding
