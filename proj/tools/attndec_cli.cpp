// Command-line front end: dataset simulation, attention decoding,
// inter-subject correlation, and paired statistics between decode reports.
//
// Exit codes: 0 success, 1 internal error, 2 usage or input error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "attndec/decoding.hpp"
#include "attndec/errors.hpp"
#include "attndec/gcca.hpp"
#include "attndec/io.hpp"
#include "attndec/parallel.hpp"
#include "attndec/simulate.hpp"
#include "attndec/stats.hpp"

namespace fs = std::filesystem;
using namespace attndec;

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

// Worker precedence: explicit flag > ATTNDEC_WORKERS > available parallelism.
int resolve_worker_flag(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("ATTNDEC_WORKERS")) {
    try {
      const int parsed = std::stoi(env);
      if (parsed > 0) return parsed;
    } catch (const std::exception&) {
      throw invalid_argument(std::string("ATTNDEC_WORKERS is not a number: ") + env);
    }
  }
  return 0;  // auto
}

struct SimulateArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int cmd_simulate(const SimulateArgs& args) {
  simulate::SimConfig config;
  if (!args.config_path.empty()) {
    io::KeyValueConfig kv = io::KeyValueConfig::from_file(args.config_path);
    config = simulate::sim_config_from_kv(kv);
  }
  if (args.seed_given) config.seed = args.seed;
  const std::string manifest = simulate::gen_dataset(config, args.out_dir);
  std::cout << manifest << '\n';
  return 0;
}

struct DecodeArgs {
  std::string manifest_path;
  std::string out_dir;
  std::string task = "svad";
  double segment_seconds = 30.0;
  bool regress_confounds = false;
  std::string region = "whole";
  std::string region_file;
  bool combine_gaze_v = false;
  std::string modality = "EEG";
  std::uint64_t seed = 0;
  int k = cca::kDefaultComponents;
  int sum_components = cca::kDefaultSumComponents;
  int surrogates = stats::kDefaultSurrogates;
  int null_shifts = stats::kDefaultNullShifts;
  double ridge = linalg::kDefaultRidge;
  int workers = 0;
};

int cmd_decode(const DecodeArgs& args) {
  const io::DatasetManifest manifest = io::read_manifest(args.manifest_path);
  const std::vector<decoding::TrialRecord> records = io::load_records(manifest);

  decoding::DecodeConfig config;
  config.task = decoding::task_from_string(args.task);
  config.segment_seconds = args.segment_seconds;
  config.confound_mode =
      args.regress_confounds ? decoding::ConfoundMode::regress : decoding::ConfoundMode::none;
  config.region = args.region;
  if (!args.region_file.empty()) config.region_map = regions::load_regions(args.region_file);
  config.combine_gaze_v = args.combine_gaze_v;
  config.modality = args.modality;
  config.seed = args.seed;
  config.k = args.k;
  config.sum_components = args.sum_components;
  config.n_surrogates = args.surrogates;
  config.n_null_shifts = args.null_shifts;
  config.ridge = args.ridge;
  config.workers = resolve_worker_flag(args.workers);

  const decoding::DecodeReport report = decoding::run_task(records, config);

  const fs::path out(args.out_dir);
  io::write_decode_report((out / "report.txt").string(), report);
  io::write_decisions_csv((out / "decisions.csv").string(), report);
  io::write_null_csv((out / "nulls.csv").string(), report);

  std::cout << "task " << report.task_name << " modality " << report.modality << " records "
            << records.size() << " subjects " << report.subjects.size() << '\n';
  std::cout << "mean_accuracy " << fmt(report.mean_accuracy) << '\n';
  std::cout << "pooled_null_mean " << fmt(report.pooled_null_mean) << " pooled_null_threshold "
            << fmt(report.pooled_null_threshold) << '\n';
  if (report.n_failed_folds > 0) {
    std::cout << "warning: " << report.n_failed_folds << " fold(s) failed numerically\n";
  }
  std::cout << "report " << (out / "report.txt").string() << '\n';
  return 0;
}

struct IscArgs {
  std::string manifest_path;
  std::string out_dir;
  int k = cca::kDefaultComponents;
  bool regress_confounds = false;
  std::string modality = "EEG";
  int null_shifts = stats::kDefaultNullShifts;
  std::uint64_t seed = 0;
  double ridge = linalg::kDefaultRidge;
};

int cmd_isc(const IscArgs& args) {
  const io::DatasetManifest manifest = io::read_manifest(args.manifest_path);
  const std::vector<decoding::TrialRecord> records = io::load_records(manifest);

  std::set<int> subject_set;
  std::set<int> pair_set;
  for (const decoding::TrialRecord& rec : records) {
    subject_set.insert(rec.subject_id);
    pair_set.insert(rec.pair_id);
  }
  const std::vector<int> subjects(subject_set.begin(), subject_set.end());
  if (subjects.size() < 2) {
    throw invalid_dataset("inter-subject correlation needs at least 2 subjects, got " +
                          std::to_string(subjects.size()));
  }

  // Group into multi-view records: one per (pair, presentation), views
  // ordered by subject id. Every subject must contribute to every group.
  std::map<std::pair<int, int>, std::vector<const decoding::TrialRecord*>> groups;
  for (const decoding::TrialRecord& rec : records) {
    auto& group = groups[{rec.pair_id, rec.presentation}];
    group.push_back(&rec);
  }
  for (auto& [key, group] : groups) {
    if (group.size() != subjects.size()) {
      throw invalid_dataset("pair " + std::to_string(key.first) + " presentation " +
                            std::to_string(key.second) + " has " +
                            std::to_string(group.size()) + " records for " +
                            std::to_string(subjects.size()) + " subjects");
    }
    std::sort(group.begin(), group.end(),
              [](const auto* a, const auto* b) { return a->subject_id < b->subject_id; });
  }

  const LagSpec lag = gcca::default_view_lags();
  const auto views_of = [&](const std::vector<const decoding::TrialRecord*>& group) {
    std::vector<TimeSeries> views;
    views.reserve(group.size());
    for (const auto* rec : group) views.push_back(rec->modality(args.modality));
    return views;
  };
  const auto confounds_of = [&](const std::vector<const decoding::TrialRecord*>& group) {
    std::vector<cca::ConfoundSet> cs;
    cs.reserve(group.size());
    for (const auto* rec : group) {
      const TimeSeries& eog = rec->modality("EOG");
      const TimeSeries& gaze_v = rec->modality("GAZE_V");
      TimeSeries c;
      c.data.resize(eog.samples(), eog.channels() + 1);
      c.data.leftCols(eog.channels()) = eog.data;
      c.data.rightCols(1) = gaze_v.data;
      c.rate = eog.rate;
      c.labels = eog.labels;
      c.labels.push_back("velocity");
      cs.push_back({std::move(c), cca::default_data_lags()});
    }
    return cs;
  };

  std::vector<io::SyncFoldRow> rows;
  for (const int test_pair : pair_set) {
    std::vector<std::vector<TimeSeries>> train_views;
    std::vector<std::vector<cca::ConfoundSet>> train_confounds;
    std::vector<std::vector<const decoding::TrialRecord*>> test_groups;
    for (const auto& [key, group] : groups) {
      if (key.first == test_pair) {
        test_groups.push_back(group);
      } else {
        train_views.push_back(views_of(group));
        if (args.regress_confounds) train_confounds.push_back(confounds_of(group));
      }
    }
    if (train_views.empty()) {
      throw invalid_dataset("cannot cross-validate with a single pair");
    }

    gcca::GccaModel model;
    if (args.regress_confounds) {
      model = gcca::fit_gcca_partial_segments(train_views, train_confounds, lag, args.k,
                                              args.ridge);
    } else {
      model = gcca::fit_gcca_segments(train_views, lag, args.k, args.ridge);
    }

    io::SyncFoldRow row;
    row.pair_id = test_pair;
    row.isc.assign(static_cast<size_t>(model.k), 0.0);
    std::vector<double> null_values;
    for (const auto& group : test_groups) {
      const std::vector<TimeSeries> views = views_of(group);
      std::vector<cca::ConfoundSet> cs;
      if (args.regress_confounds) cs = confounds_of(group);
      const gcca::SyncReport sync =
          gcca::sync_report(model, views, args.regress_confounds ? &cs : nullptr);
      for (size_t j = 0; j < sync.entries.size(); ++j) row.isc[j] += sync.entries[j].isc;

      if (args.null_shifts > 0) {
        // Standardized component-1 projections per view; independent circular
        // rotations break inter-view alignment while preserving each view's
        // autocorrelation.
        const int n_views = static_cast<int>(views.size());
        std::vector<Eigen::VectorXd> z(static_cast<size_t>(n_views));
        std::vector<bool> ok(static_cast<size_t>(n_views), false);
        for (int v = 0; v < n_views; ++v) {
          Eigen::VectorXd proj =
              gcca::view_projection(model, views[static_cast<size_t>(v)], v,
                                    args.regress_confounds ? &cs[static_cast<size_t>(v)] : nullptr)
                  .col(0);
          const double mean = proj.mean();
          proj.array() -= mean;
          const double norm = proj.norm();
          if (norm > 0.0) {
            proj /= norm;
            ok[static_cast<size_t>(v)] = true;
          }
          z[static_cast<size_t>(v)] = std::move(proj);
        }
        const Eigen::Index t = z[0].size();
        Rng rng = Rng::derived(args.seed, {0x697363, static_cast<std::uint64_t>(test_pair),
                                           static_cast<std::uint64_t>(group[0]->presentation)});
        for (int draw = 0; draw < args.null_shifts; ++draw) {
          std::vector<Eigen::Index> offset(static_cast<size_t>(n_views));
          for (int v = 0; v < n_views; ++v) {
            offset[static_cast<size_t>(v)] = 1 + static_cast<Eigen::Index>(rng.uniform_int(
                                                     static_cast<std::uint64_t>(t - 1)));
          }
          double acc = 0.0;
          int n_pairs = 0;
          for (int i = 0; i < n_views; ++i) {
            for (int j = i + 1; j < n_views; ++j) {
              double dot = 0.0;
              if (ok[static_cast<size_t>(i)] && ok[static_cast<size_t>(j)]) {
                const Eigen::Index oi = offset[static_cast<size_t>(i)];
                const Eigen::Index oj = offset[static_cast<size_t>(j)];
                for (Eigen::Index s = 0; s < t; ++s) {
                  dot += z[static_cast<size_t>(i)]((s + oi) % t) *
                         z[static_cast<size_t>(j)]((s + oj) % t);
                }
              }
              acc += dot;
              ++n_pairs;
            }
          }
          null_values.push_back(acc / n_pairs);
        }
      }
    }
    for (double& v : row.isc) v /= static_cast<double>(test_groups.size());
    if (!null_values.empty()) {
      stats::NullDistribution null;
      null.generator = "circular_shift";
      null.values = std::move(null_values);
      row.null_threshold = stats::significance_threshold(null);
    }
    rows.push_back(std::move(row));
  }

  const fs::path out(args.out_dir);
  io::write_sync_report((out / "isc_report.txt").string(), rows, args.k,
                        args.regress_confounds);
  for (const io::SyncFoldRow& row : rows) {
    std::cout << "fold pair=" << row.pair_id << " isc1=" << fmt(row.isc.empty() ? 0.0 : row.isc[0])
              << " null_threshold=" << fmt(row.null_threshold) << '\n';
  }
  std::cout << "report " << (out / "isc_report.txt").string() << '\n';
  return 0;
}

struct StatsArgs {
  std::vector<std::string> report_paths;
  std::string out_path;
  std::string adjust = "bh";
};

int cmd_stats(const StatsArgs& args) {
  if (args.report_paths.size() < 2) {
    throw invalid_argument("stats needs at least two reports to compare");
  }
  if (args.adjust != "bh" && args.adjust != "none") {
    throw invalid_argument("unknown adjustment '" + args.adjust + "' (expected bh or none)");
  }
  std::vector<io::ReportSummary> reports;
  reports.reserve(args.report_paths.size());
  for (const std::string& path : args.report_paths) {
    reports.push_back(io::read_decode_report(path));
  }
  for (size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].subject_ids != reports[0].subject_ids) {
      throw invalid_dataset("subject sets differ between " + args.report_paths[0] + " and " +
                            args.report_paths[i]);
    }
  }

  struct Row {
    size_t a, b;
    bool degenerate = false;
    std::string note;
    double w = 0.0;
    int n = 0;
    double p = 1.0;
    bool exact = false;
  };
  std::vector<Row> rows;
  std::vector<double> p_values;  // for adjustment, aligned with non-degenerate rows
  std::vector<size_t> p_rows;
  for (size_t a = 0; a < reports.size(); ++a) {
    for (size_t b = a + 1; b < reports.size(); ++b) {
      Row row;
      row.a = a;
      row.b = b;
      try {
        const stats::WilcoxonResult res =
            stats::wilcoxon_signed_rank(reports[a].accuracies, reports[b].accuracies);
        row.w = res.w;
        row.n = res.n_effective;
        row.p = res.p;
        row.exact = res.exact;
        p_rows.push_back(rows.size());
        p_values.push_back(res.p);
      } catch (const invalid_argument& e) {
        row.degenerate = true;
        row.note = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  std::vector<double> adjusted = p_values;
  if (args.adjust == "bh" && !p_values.empty()) adjusted = stats::bh_adjust(p_values);

  std::ostringstream table;
  table << "attndec-stats v1\n";
  table << "test wilcoxon adjust " << args.adjust << '\n';
  for (size_t i = 0; i < reports.size(); ++i) {
    table << "input " << i + 1 << ' ' << args.report_paths[i] << " mean_accuracy "
          << fmt(reports[i].mean_accuracy) << '\n';
  }
  size_t adj_idx = 0;
  for (const Row& row : rows) {
    table << "compare " << row.a + 1 << " vs " << row.b + 1;
    if (row.degenerate) {
      table << " degenerate note=" << row.note << '\n';
      continue;
    }
    const double p_adj = adjusted[adj_idx++];
    table << " n=" << row.n << " w=" << fmt(row.w) << " p=" << fmt(row.p)
          << " p_adjusted=" << fmt(p_adj) << " exact=" << (row.exact ? 1 : 0)
          << " significant=" << (p_adj < 0.05 ? 1 : 0) << '\n';
  }

  std::cout << table.str();
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path, std::ios::trunc);
    if (!out) throw io_error("cannot write " + args.out_path);
    out << table.str();
    if (!out) throw io_error("write failed: " + args.out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stimulus-informed attention decoding toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic multi-modal dataset");
  sim->add_option("--config", sim_args.config_path, "Flat key = value config file");
  sim->add_option("--out", sim_args.out_dir, "Output directory")->required();
  CLI::Option* sim_seed = sim->add_option("--seed", sim_args.seed, "Master seed override");

  DecodeArgs dec_args;
  CLI::App* dec = app.add_subcommand("decode", "Run the attention decoding protocol");
  dec->add_option("--manifest", dec_args.manifest_path, "Dataset manifest")->required();
  dec->add_option("--out", dec_args.out_dir, "Output directory")->required();
  dec->add_option("--task", dec_args.task, "svad | mm");
  dec->add_option("--segment-seconds", dec_args.segment_seconds, "Test segment length");
  dec->add_flag("--regress-confounds", dec_args.regress_confounds,
                "Regress periocular confounds out of both views");
  dec->add_option("--region", dec_args.region, "Channel region name (default whole)");
  dec->add_option("--region-file", dec_args.region_file, "Custom region definition file");
  dec->add_flag("--combine-gaze-v", dec_args.combine_gaze_v,
                "Append gaze velocity to the data channels");
  dec->add_option("--modality", dec_args.modality, "Data stream to decode (default EEG)");
  dec->add_option("--seed", dec_args.seed, "Master seed");
  dec->add_option("--k", dec_args.k, "Components to fit");
  dec->add_option("--sum-components", dec_args.sum_components, "Components summed per decision");
  dec->add_option("--surrogates", dec_args.surrogates, "Phase-scramble draws per fold");
  dec->add_option("--null-shifts", dec_args.null_shifts, "Circular shifts per subject");
  dec->add_option("--ridge", dec_args.ridge, "Relative diagonal loading");
  dec->add_option("--workers", dec_args.workers, "Worker threads (0 = auto)");

  IscArgs isc_args;
  CLI::App* isc = app.add_subcommand("isc", "Cross-validated inter-subject correlation");
  isc->add_option("--manifest", isc_args.manifest_path, "Dataset manifest")->required();
  isc->add_option("--out", isc_args.out_dir, "Output directory")->required();
  isc->add_option("--k", isc_args.k, "Components to fit");
  isc->add_flag("--regress-confounds", isc_args.regress_confounds,
                "Regress periocular confounds out of every view");
  isc->add_option("--modality", isc_args.modality, "Data stream (default EEG)");
  isc->add_option("--null-shifts", isc_args.null_shifts, "Circular-shift null draws per fold");
  isc->add_option("--seed", isc_args.seed, "Master seed");
  isc->add_option("--ridge", isc_args.ridge, "Relative diagonal loading");

  StatsArgs stats_args;
  CLI::App* st = app.add_subcommand("stats", "Paired tests between decode reports");
  st->add_option("--reports", stats_args.report_paths, "Decode report files")
      ->required()
      ->expected(-2);
  st->add_option("--out", stats_args.out_path, "Write the comparison table here too");
  st->add_option("--adjust", stats_args.adjust, "bh | none");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0; usage errors exit 2
  }

  try {
    if (sim->parsed()) {
      sim_args.seed_given = sim_seed->count() > 0;
      return cmd_simulate(sim_args);
    }
    if (dec->parsed()) return cmd_decode(dec_args);
    if (isc->parsed()) return cmd_isc(isc_args);
    if (st->parsed()) return cmd_stats(stats_args);
  } catch (const invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const invalid_dataset& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
