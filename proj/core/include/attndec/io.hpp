// On-disk formats: binary/CSV matrix containers with a rate/labels sidecar,
// flow-field and mask containers, the dataset manifest, flat typed key-value
// configs, and structured report emission/parsing.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "attndec/decoding.hpp"
#include "attndec/features.hpp"
#include "attndec/gcca.hpp"
#include "attndec/types.hpp"

namespace attndec::io {

// ---- matrix container -----------------------------------------------------
// Binary layout: 16-byte header = magic "MVTS", u32 little-endian rows (T),
// u32 little-endian columns (D), u32 zero (reserved); then T*D IEEE float64
// little-endian, row-major. A text sidecar at <path>.meta carries one line:
//   rate=<hz> labels=<comma-separated>
// CSV layout: header row of channel labels, one sample per row; the same
// sidecar carries the rate. Binary round-trips bit-exactly; CSV prints 17
// significant digits so values survive within 1e-12.

void write_matrix(const std::string& path, const TimeSeries& series);
TimeSeries read_matrix(const std::string& path);
void write_csv(const std::string& path, const TimeSeries& series);
TimeSeries read_csv(const std::string& path);
// Dispatch on extension: ".csv" -> CSV, anything else -> binary.
TimeSeries read_series(const std::string& path);
void write_series(const std::string& path, const TimeSeries& series);

// ---- flow / mask containers -------------------------------------------------
// Stored in the binary matrix container, one row per frame. A flow frame
// flattens to [vx row-major..., vy row-major...]; a mask frame to 0/1 values.
// The sidecar labels slot records the frame shape as "shape=HxWx2" / "HxWx1".
void write_flow(const std::string& path, const features::FlowField& flow);
features::FlowField read_flow(const std::string& path);
void write_mask(const std::string& path, const features::ObjectMask& mask, double frame_rate);
features::ObjectMask read_mask(const std::string& path);

// ---- dataset manifest -------------------------------------------------------
// Line-oriented text. First line "attndec-dataset v1"; then "rate <hz>",
// "subjects <n>", and one "trial" line per record with key=value tokens:
//   trial subject=1 pair=1 presentation=1 attended=1 EEG=rel/path ... feat1=... feat2=...
// Paths are relative to the manifest's directory.
struct ManifestEntry {
  int subject_id = 0;
  int pair_id = 0;
  int presentation = 0;
  int attended_object = 0;
  std::map<std::string, std::string> modality_paths;
  std::array<std::string, 2> feature_paths;
};

struct DatasetManifest {
  int version = 1;
  double rate = 0.0;
  int n_subjects = 0;
  std::vector<ManifestEntry> entries;
  std::string root;  // directory of the manifest file, set on read
};

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& manifest);

// Load every referenced file and validate the records (shared rate/length,
// both presentations per pair with opposite attended objects). Feature files
// shared between entries are read once.
std::vector<decoding::TrialRecord> load_records(const DatasetManifest& manifest);

// ---- flat key-value config --------------------------------------------------
// One "key = value" per line, '#' comments. Typed accessors; consumers must
// call require_consumed() so misspelled keys are hard errors.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text, const std::string& origin = "<config>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_real(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback);
  // Throws listing every key never read by a getter.
  void require_consumed() const;

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> consumed_;
};

// ---- reports ----------------------------------------------------------------
void write_decode_report(const std::string& path, const decoding::DecodeReport& report);
void write_decisions_csv(const std::string& path, const decoding::DecodeReport& report);
// Null distributions for audit: kind,owner,value rows.
void write_null_csv(const std::string& path, const decoding::DecodeReport& report);

// The per-subject accuracy table needed for paired tests between runs.
struct ReportSummary {
  std::string task_name;
  std::vector<int> subject_ids;
  std::vector<double> accuracies;  // aligned with subject_ids
  double mean_accuracy = 0.0;
};
ReportSummary read_decode_report(const std::string& path);

// Cross-validated group synchrony: one row per fold.
struct SyncFoldRow {
  int pair_id = 0;
  std::vector<double> isc;       // per component
  double null_threshold = 0.0;   // circular-shift null for component 1; 0 if not computed
};
void write_sync_report(const std::string& path, const std::vector<SyncFoldRow>& rows, int k,
                       bool confounds);
}  // namespace attndec::io
