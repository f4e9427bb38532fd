#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "attndec/errors.hpp"
#include "attndec/io.hpp"
#include "attndec/linalg.hpp"
#include "attndec/rng.hpp"
#include "attndec/simulate.hpp"
#include "attndec/types.hpp"

using namespace attndec;
namespace fs = std::filesystem;

namespace {

simulate::SimConfig small_config() {
  simulate::SimConfig config;
  config.n_subjects = 2;
  config.n_pairs = 2;
  config.trial_seconds = 30.0;
  config.rate = 30.0;
  config.n_channels = 8;
  config.attended_gain = 1.0;
  config.unattended_gain = 0.25;
  config.snr_db = 0.0;
  config.seed = 99;
  return config;
}

Eigen::VectorXd conv_oracle(const Eigen::VectorXd& h, const Eigen::VectorXd& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index k = 0; k < h.size() && k <= i; ++k) out(i) += h(k) * x(i - k);
  return out;
}

double population_std(const Eigen::VectorXd& v) {
  const Eigen::VectorXd c = v.array() - v.mean();
  return std::sqrt(c.squaredNorm() / static_cast<double>(v.size()));
}

}  // namespace

TEST_CASE("generated stimulus features are nonnegative, smooth, unit-power, and distinct") {
  Rng rng1(1), rng2(2);
  const TimeSeries f1 = simulate::gen_feature(334.0, 30.0, rng1);
  const TimeSeries f2 = simulate::gen_feature(334.0, 30.0, rng2);
  REQUIRE(f1.samples() >= 10000);
  REQUIRE(f1.channels() == 1);
  CHECK(f1.data.minCoeff() >= 0.0);
  CHECK(population_std(f1.data.col(0)) == doctest::Approx(1.0).epsilon(1e-9));

  // the low-pass step makes neighbors strongly correlated
  const Eigen::Index t = f1.samples();
  const double lag1 =
      linalg::pearson(f1.data.col(0).head(t - 1), f1.data.col(0).tail(t - 1));
  CHECK(lag1 > 0.5);

  // independent draws are near-orthogonal
  const double cross = linalg::pearson(f1.data.col(0), f2.data.col(0));
  CHECK(std::abs(cross) < 0.1);

  // fully seed-determined
  Rng rng1b(1);
  const TimeSeries f1b = simulate::gen_feature(334.0, 30.0, rng1b);
  CHECK((f1.data - f1b.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("subject responses share structure across the attended and unattended paths") {
  simulate::SimConfig config = small_config();
  double corr_sum = 0.0;
  for (int s = 0; s < 40; ++s) {
    Rng rng(static_cast<std::uint64_t>(s) + 1000);
    const simulate::SubjectModel model = simulate::gen_subject_model(config, rng);
    REQUIRE(model.h_att.size() == config.response_kernel_length);
    REQUIRE(model.topo_att.size() == config.n_channels);
    CHECK(model.topo_att.norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.topo_eye.norm() == doctest::Approx(1.0).epsilon(1e-9));
    corr_sum += linalg::pearson(model.h_att, model.h_unatt);
  }
  // built to be correlated but not identical
  const double mean_corr = corr_sum / 40.0;
  CHECK(mean_corr > 0.3);
  CHECK(mean_corr < 0.95);
}

TEST_CASE("record grid covers every subject, pair, and presentation") {
  const simulate::SimConfig config = small_config();
  const simulate::SimOutput out = simulate::gen_records(config);
  REQUIRE(static_cast<int>(out.records.size()) == config.n_subjects * config.n_pairs * 2);
  REQUIRE(out.truth.trials.size() == out.records.size());
  REQUIRE(static_cast<int>(out.truth.subjects.size()) == config.n_subjects);

  for (const decoding::TrialRecord& rec : out.records) {
    CHECK(rec.attended_object == rec.presentation);  // attention swaps across presentations
    for (const char* name : {"EEG", "EOG", "EOG_V", "GAZE", "GAZE_V", "SACC"}) {
      REQUIRE(rec.modalities.count(name) == 1);
    }
    CHECK(rec.modality("EEG").channels() == config.n_channels);
    CHECK(rec.modality("EEG").rate == config.rate);
    CHECK(rec.duration_s() == doctest::Approx(config.trial_seconds));
    CHECK_NOTHROW(rec.validate());
  }

  // every subject sees the same stimulus: features depend only on (pair, object)
  const auto& first = out.records[0];
  for (const decoding::TrialRecord& rec : out.records) {
    if (rec.pair_id == first.pair_id) {
      CHECK((rec.features[0].data - first.features[0].data).cwiseAbs().maxCoeff() == 0.0);
      CHECK((rec.features[1].data - first.features[1].data).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("data channels decompose into the documented forward model") {
  simulate::SimConfig config = small_config();
  config.confound_gain = 0.4;
  config.distractor_switch_rate = 0.0;  // latents are pure convolutions then
  const simulate::SimOutput out = simulate::gen_records(config);

  for (size_t i = 0; i < out.records.size(); ++i) {
    const decoding::TrialRecord& rec = out.records[i];
    const simulate::TrialTruth& truth = out.truth.trials[i];
    const simulate::SubjectModel* model = nullptr;
    for (const simulate::SubjectTruth& s : out.truth.subjects) {
      if (s.subject_id == rec.subject_id) model = &s.model;
    }
    REQUIRE(model != nullptr);

    // the stored latent is the causal convolution of the kernel with the
    // attended feature (no lapses here)
    const Eigen::VectorXd f_att = rec.attended_feature().data.col(0);
    const Eigen::VectorXd lat = conv_oracle(model->h_att, f_att);
    CHECK((lat - truth.latent_att.data.col(0)).cwiseAbs().maxCoeff() < 1e-9);

    // subtracting every deterministic path leaves noise of exactly the
    // recorded power, and the recorded powers honor the requested SNR
    const Eigen::MatrixXd deterministic =
        config.attended_gain * truth.latent_att.data.col(0) * model->topo_att.transpose() +
        config.unattended_gain * truth.latent_unatt.data.col(0) * model->topo_unatt.transpose() +
        config.confound_gain * truth.confound.data.col(0) * model->topo_eye.transpose();
    const Eigen::MatrixXd residual = rec.modality("EEG").data - deterministic;
    const double p_residual =
        residual.squaredNorm() / static_cast<double>(residual.rows() * residual.cols());
    CHECK(p_residual == doctest::Approx(truth.noise_power).epsilon(1e-9));
    const double snr_db = 10.0 * std::log10(truth.signal_power / truth.noise_power);
    CHECK(snr_db == doctest::Approx(config.snr_db).epsilon(1e-9));
    CHECK(truth.switch_fraction == 0.0);
  }
}

TEST_CASE("a pure-noise dataset falls back to unit noise power") {
  simulate::SimConfig config = small_config();
  config.n_subjects = 1;
  config.n_pairs = 1;
  config.attended_gain = 0.0;
  config.unattended_gain = 0.0;
  config.confound_gain = 0.0;
  const simulate::SimOutput out = simulate::gen_records(config);
  for (const simulate::TrialTruth& truth : out.truth.trials) {
    CHECK(truth.signal_power == 0.0);
    CHECK(truth.noise_power == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("attention lapses occupy part of the trial when enabled") {
  simulate::SimConfig config = small_config();
  config.distractor_switch_rate = 1.0;
  const simulate::SimOutput out = simulate::gen_records(config);
  double total = 0.0;
  for (const simulate::TrialTruth& truth : out.truth.trials) {
    CHECK(truth.switch_fraction >= 0.0);
    CHECK(truth.switch_fraction <= 1.0);
    total += truth.switch_fraction;
  }
  CHECK(total / static_cast<double>(out.truth.trials.size()) > 0.02);
}

TEST_CASE("identical configs give bit-identical recordings; different seeds differ") {
  const simulate::SimConfig config = small_config();
  const simulate::SimOutput a = simulate::gen_records(config);
  const simulate::SimOutput b = simulate::gen_records(config);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK((a.records[i].modality("EEG").data - b.records[i].modality("EEG").data)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((a.records[i].modality("GAZE").data - b.records[i].modality("GAZE").data)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  simulate::SimConfig other = config;
  other.seed = config.seed + 1;
  const simulate::SimOutput c = simulate::gen_records(other);
  CHECK((a.records[0].modality("EEG").data - c.records[0].modality("EEG").data)
            .cwiseAbs()
            .maxCoeff() > 1e-8);
}

TEST_CASE("gain changes leave the random draws untouched") {
  // The noise, gaze, and lapse streams must not depend on the gain values,
  // or parameter sweeps at a fixed seed would not be comparable.
  simulate::SimConfig config = small_config();
  config.unattended_gain = 0.0;
  const simulate::SimOutput a = simulate::gen_records(config);
  config.unattended_gain = 1.0;
  const simulate::SimOutput b = simulate::gen_records(config);
  // gaze is gain-independent entirely
  CHECK((a.records[0].modality("GAZE").data - b.records[0].modality("GAZE").data)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  // the EEG difference is exactly the added unattended pathway: removing both
  // deterministic parts leaves the same noise realization up to SNR rescaling
  const simulate::TrialTruth& ta = a.truth.trials[0];
  const simulate::TrialTruth& tb = b.truth.trials[0];
  CHECK((ta.latent_unatt.data - tb.latent_unatt.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("config parsing covers every key and rejects strangers") {
  io::KeyValueConfig kv = io::KeyValueConfig::from_string(
      "n_subjects = 3\n"
      "n_pairs = 4\n"
      "trial_seconds = 45\n"
      "rate = 30\n"
      "n_channels = 16\n"
      "attended_gain = 0.9\n"
      "unattended_gain = 0.3\n"
      "confound_gain = 0.2\n"
      "noise_color = 1.5\n"
      "snr_db = -3\n"
      "response_kernel_length = 12\n"
      "distractor_switch_rate = 0.5\n"
      "seed = 77\n");
  const simulate::SimConfig config = simulate::sim_config_from_kv(kv);
  CHECK(config.n_subjects == 3);
  CHECK(config.n_pairs == 4);
  CHECK(config.trial_seconds == doctest::Approx(45.0));
  CHECK(config.n_channels == 16);
  CHECK(config.snr_db == doctest::Approx(-3.0));
  CHECK(config.seed == 77);
  CHECK(config.region_localization.empty());

  io::KeyValueConfig focus = io::KeyValueConfig::from_string("region_focus = occipital\n");
  const simulate::SimConfig focused = simulate::sim_config_from_kv(focus);
  REQUIRE_FALSE(focused.region_localization.empty());
  CHECK(focused.region_localization.at("Oz") == doctest::Approx(1.0));
  CHECK(focused.region_localization.at("Fz") == doctest::Approx(0.1));

  io::KeyValueConfig bad_region = io::KeyValueConfig::from_string("region_focus = nowhere\n");
  CHECK_THROWS_AS(simulate::sim_config_from_kv(bad_region), invalid_argument);

  io::KeyValueConfig stranger = io::KeyValueConfig::from_string("n_subjects = 3\ntypo_key = 1\n");
  CHECK_THROWS_AS(simulate::sim_config_from_kv(stranger), invalid_argument);
}

TEST_CASE("impossible configurations are rejected") {
  simulate::SimConfig config = small_config();
  config.n_channels = 0;
  CHECK_THROWS_AS(config.validate(), invalid_argument);
  config = small_config();
  config.n_channels = 65;
  CHECK_THROWS_AS(config.validate(), invalid_argument);
  config = small_config();
  config.attended_gain = -1.0;
  CHECK_THROWS_AS(config.validate(), invalid_argument);
  config = small_config();
  config.trial_seconds = 0.1;  // shorter than the response kernel
  CHECK_THROWS_AS(config.validate(), invalid_argument);
}

TEST_CASE("the on-disk dataset loads back identical to the in-memory one") {
  const fs::path dir =
      fs::temp_directory_path() / ("attndec_sim_" + std::to_string(::getpid()));
  fs::remove_all(dir);

  simulate::SimConfig config = small_config();
  config.n_subjects = 1;
  const std::string manifest_path = simulate::gen_dataset(config, dir.string());
  CHECK(fs::exists(manifest_path));
  CHECK(fs::exists(dir / "ground_truth" / "audit.json"));

  const io::DatasetManifest manifest = io::read_manifest(manifest_path);
  const std::vector<decoding::TrialRecord> from_disk = io::load_records(manifest);
  const simulate::SimOutput in_memory = simulate::gen_records(config);
  REQUIRE(from_disk.size() == in_memory.records.size());
  for (size_t i = 0; i < from_disk.size(); ++i) {
    CHECK(from_disk[i].subject_id == in_memory.records[i].subject_id);
    CHECK(from_disk[i].pair_id == in_memory.records[i].pair_id);
    CHECK((from_disk[i].modality("EEG").data - in_memory.records[i].modality("EEG").data)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((from_disk[i].features[0].data - in_memory.records[i].features[0].data)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  // the audit file is real JSON with the subject models inside
  std::ifstream audit(dir / "ground_truth" / "audit.json");
  std::string text((std::istreambuf_iterator<char>(audit)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"subjects\"") != std::string::npos);
  CHECK(text.find("\"trials\"") != std::string::npos);

  fs::remove_all(dir);
}
