#include "attndec/simulate.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "attndec/errors.hpp"
#include "attndec/features.hpp"
#include "attndec/regions.hpp"

namespace fs = std::filesystem;

namespace attndec::simulate {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Seed-derivation stream tags.
constexpr std::uint64_t kTagFeature = 0x66656174;  // per (pair, object)
constexpr std::uint64_t kTagSubject = 0x73756266;  // per subject
constexpr std::uint64_t kTagTrial = 0x7472696c;    // per (subject, pair, presentation)

double population_std(const VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().mean());
}

VectorXd zscore(const VectorXd& v) {
  const double mean = v.mean();
  const double sd = population_std(v);
  if (sd == 0.0) return VectorXd::Zero(v.size());
  return (v.array() - mean) / sd;
}

// Centered moving average with an all-positive normalized Hamming window:
// zero phase by symmetry and preserves nonnegativity.
VectorXd smooth_positive(const VectorXd& x, Index window) {
  const Index t = x.size();
  if (window > t) window = t;
  if (window % 2 == 0) --window;
  if (window < 3) return x;
  const Index c = (window - 1) / 2;
  VectorXd w(window);
  for (Index k = 0; k < window; ++k) {
    w(k) = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                  static_cast<double>(window - 1));
  }
  w /= w.sum();
  VectorXd out(t);
  for (Index i = 0; i < t; ++i) {
    double acc = 0.0;
    for (Index k = 0; k < window; ++k) {
      Index j = i + k - c;
      if (j < 0) j = -j;
      if (j >= t) j = 2 * (t - 1) - j;
      acc += w(k) * x(j);
    }
    out(i) = acc;
  }
  return out;
}

// Causal FIR response: out(t) = sum_k h(k) x(t - k), zero before the start.
VectorXd causal_conv(const VectorXd& h, const VectorXd& x) {
  const Index t = x.size();
  const Index l = h.size();
  VectorXd out = VectorXd::Zero(t);
  for (Index i = 0; i < t; ++i) {
    const Index kmax = std::min<Index>(l - 1, i);
    double acc = 0.0;
    for (Index k = 0; k <= kmax; ++k) acc += h(k) * x(i - k);
    out(i) = acc;
  }
  return out;
}

// Gaussian noise with power spectral density ~ 1/f^alpha, zero mean.
VectorXd colored_noise(Index t, double alpha, Rng& rng) {
  if (t < 2) return VectorXd::Zero(t);
  std::vector<std::complex<double>> spectrum(static_cast<size_t>(t),
                                             std::complex<double>(0.0, 0.0));
  const Index half = t / 2;
  for (Index k = 1; k < half; ++k) {
    const double amp = std::pow(static_cast<double>(k), -alpha / 2.0);
    const std::complex<double> c(rng.normal(), rng.normal());
    spectrum[static_cast<size_t>(k)] = amp * c / std::sqrt(2.0);
    spectrum[static_cast<size_t>(t - k)] = std::conj(spectrum[static_cast<size_t>(k)]);
  }
  if (t % 2 == 0) {
    const double amp = std::pow(static_cast<double>(half), -alpha / 2.0);
    spectrum[static_cast<size_t>(half)] = std::complex<double>(amp * rng.normal(), 0.0);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> time(static_cast<size_t>(t));
  fft.inv(time, spectrum);
  VectorXd out(t);
  for (Index i = 0; i < t; ++i) out(i) = time[static_cast<size_t>(i)].real();
  return out;
}

// Front-to-back falloff of eye-artifact leakage by electrode name prefix.
double eye_weight(const std::string& label) {
  static const std::vector<std::pair<const char*, double>> table = {
      {"Fp", 1.0}, {"AF", 1.0}, {"FT", 0.6}, {"FC", 0.6}, {"F", 1.0},  {"CP", 0.2},
      {"TP", 0.2}, {"C", 0.35}, {"T", 0.35}, {"PO", 0.05}, {"P", 0.1}, {"O", 0.05},
      {"I", 0.05}};
  for (const auto& [prefix, weight] : table) {
    if (label.rfind(prefix, 0) == 0) return weight;
  }
  return 0.1;
}

std::vector<std::string> channel_labels(int n_channels) {
  const auto& cap = regions::cap64_labels();
  return {cap.begin(), cap.begin() + n_channels};
}

}  // namespace

void SimConfig::validate() const {
  if (n_subjects < 1) throw invalid_argument("sim config: n_subjects must be >= 1");
  if (n_pairs < 1) throw invalid_argument("sim config: n_pairs must be >= 1");
  if (rate <= 0.0) throw invalid_argument("sim config: rate must be positive");
  if (trial_seconds <= 0.0) throw invalid_argument("sim config: trial_seconds must be positive");
  if (n_channels < 1 || n_channels > 64) {
    throw invalid_argument("sim config: n_channels must be in [1, 64]");
  }
  if (attended_gain < 0.0 || unattended_gain < 0.0 || confound_gain < 0.0) {
    throw invalid_argument("sim config: gains must be non-negative");
  }
  if (response_kernel_length < 1) {
    throw invalid_argument("sim config: response_kernel_length must be >= 1");
  }
  if (distractor_switch_rate < 0.0) {
    throw invalid_argument("sim config: distractor_switch_rate must be non-negative");
  }
  if (trial_seconds * rate < static_cast<double>(response_kernel_length)) {
    throw invalid_argument("sim config: trial shorter than the response kernel");
  }
}

SimConfig sim_config_from_kv(io::KeyValueConfig& kv) {
  SimConfig config;
  config.n_subjects = static_cast<int>(kv.get_int("n_subjects", config.n_subjects));
  config.n_pairs = static_cast<int>(kv.get_int("n_pairs", config.n_pairs));
  config.trial_seconds = kv.get_real("trial_seconds", config.trial_seconds);
  config.rate = kv.get_real("rate", config.rate);
  config.n_channels = static_cast<int>(kv.get_int("n_channels", config.n_channels));
  config.attended_gain = kv.get_real("attended_gain", config.attended_gain);
  config.unattended_gain = kv.get_real("unattended_gain", config.unattended_gain);
  config.confound_gain = kv.get_real("confound_gain", config.confound_gain);
  config.noise_color = kv.get_real("noise_color", config.noise_color);
  config.snr_db = kv.get_real("snr_db", config.snr_db);
  config.response_kernel_length =
      static_cast<int>(kv.get_int("response_kernel_length", config.response_kernel_length));
  config.distractor_switch_rate =
      kv.get_real("distractor_switch_rate", config.distractor_switch_rate);
  config.seed = kv.get_seed("seed", config.seed);
  const std::string focus = kv.get_string("region_focus", "");
  if (!focus.empty()) {
    const double focus_gain = kv.get_real("region_focus_gain", 1.0);
    const double background_gain = kv.get_real("region_background_gain", 0.1);
    const auto& map = regions::default_regions();
    const auto it = map.find(focus);
    if (it == map.end()) {
      throw invalid_argument("sim config: region_focus '" + focus + "' is not a known region");
    }
    for (const std::string& label : regions::cap64_labels()) {
      config.region_localization[label] = background_gain;
    }
    for (const std::string& label : it->second) config.region_localization[label] = focus_gain;
  }
  kv.require_consumed();
  config.validate();
  return config;
}

TimeSeries gen_feature(double duration_s, double rate, Rng& rng) {
  if (rate <= 0.0) throw invalid_argument("gen_feature: rate must be positive");
  const Index t = std::max<Index>(2, static_cast<Index>(std::llround(duration_s * rate)));
  VectorXd x(t);
  for (Index i = 0; i < t; ++i) x(i) = rng.normal();

  // Low-pass the white draw so the rectified series has slow dynamics.
  const double cutoff = rate / 10.0;  // 3 Hz at 30 Hz
  int taps = 8 * static_cast<int>(std::lround(rate / (2.0 * cutoff))) + 1;
  const int max_taps = static_cast<int>(t % 2 == 0 ? t - 1 : t);
  taps = std::min(taps, max_taps);
  TimeSeries smooth = make_series(x, rate, "feature");
  smooth.labels = {"feature"};
  if (taps >= 3) {
    smooth = features::zero_phase_filter(smooth, features::lowpass_kernel(cutoff, rate, taps));
  }
  VectorXd env = smooth.data.col(0).cwiseAbs();
  env = smooth_positive(env, std::max<Index>(3, static_cast<Index>(std::lround(rate / 4.0)) | 1));
  const double sd = population_std(env);
  if (sd > 0.0) env /= sd;

  TimeSeries out;
  out.data = env;
  out.rate = rate;
  out.labels = {"feature"};
  return out;
}

SubjectModel gen_subject_model(const SimConfig& config, Rng& rng) {
  const int l = config.response_kernel_length;
  const int d = config.n_channels;
  SubjectModel model;

  // Correlated smooth kernels: shared draw mixed with a fresh one (rho 0.7),
  // shaped by a raised-cosine window so responses start and end near zero.
  VectorXd g1(l), g2(l);
  for (int k = 0; k < l; ++k) g1(k) = rng.normal();
  for (int k = 0; k < l; ++k) g2(k) = rng.normal();
  VectorXd window = VectorXd::Ones(l);
  if (l > 1) {
    for (int k = 0; k < l; ++k) {
      window(k) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / static_cast<double>(l - 1)));
    }
  }
  const double rho = 0.7;
  model.h_att = (window.array() * g1.array()).matrix();
  model.h_unatt = (window.array() * (rho * g1 + std::sqrt(1.0 - rho * rho) * g2).array()).matrix();
  if (model.h_att.norm() > 0.0) model.h_att /= model.h_att.norm();
  if (model.h_unatt.norm() > 0.0) model.h_unatt /= model.h_unatt.norm();

  // Correlated response topographies, optionally localized by channel weight.
  VectorXd t1(d), t2(d);
  for (int c = 0; c < d; ++c) t1(c) = rng.normal();
  for (int c = 0; c < d; ++c) t2(c) = rng.normal();
  VectorXd topo_att = t1;
  VectorXd topo_unatt = rho * t1 + std::sqrt(1.0 - rho * rho) * t2;
  const std::vector<std::string> labels = channel_labels(d);
  if (!config.region_localization.empty()) {
    for (int c = 0; c < d; ++c) {
      const auto it = config.region_localization.find(labels[static_cast<size_t>(c)]);
      const double w = it != config.region_localization.end() ? it->second : 1.0;
      topo_att(c) *= w;
      topo_unatt(c) *= w;
    }
  }
  if (topo_att.norm() > 0.0) topo_att /= topo_att.norm();
  if (topo_unatt.norm() > 0.0) topo_unatt /= topo_unatt.norm();
  model.topo_att = topo_att;
  model.topo_unatt = topo_unatt;

  VectorXd eye(d);
  for (int c = 0; c < d; ++c) {
    eye(c) = eye_weight(labels[static_cast<size_t>(c)]) * (0.7 + 0.6 * rng.uniform());
  }
  if (eye.norm() > 0.0) eye /= eye.norm();
  model.topo_eye = eye;
  return model;
}

TrialOut gen_subject_trial(const std::array<TimeSeries, 2>& features_pair, int attended,
                           const SimConfig& config, const SubjectModel& model, int subject_id,
                           int pair_id, int presentation, Rng& rng) {
  if (attended != 1 && attended != 2) {
    throw invalid_argument("gen_subject_trial: attended must be 1 or 2");
  }
  const TimeSeries& f_att_ts = features_pair[static_cast<size_t>(attended - 1)];
  const TimeSeries& f_un_ts = features_pair[static_cast<size_t>(2 - attended)];
  const Index t = f_att_ts.samples();
  const double rate = config.rate;
  const VectorXd f_att = f_att_ts.data.col(0);
  const VectorXd f_un = f_un_ts.data.col(0);
  const double mean_att = std::max(f_att.mean(), 1e-12);
  const double mean_un = std::max(f_un.mean(), 1e-12);

  // Attention-lapse state: occasional switches make the subject briefly track
  // the distractor, decorrelating their response from the group's.
  const double p_switch = std::min(1.0, config.distractor_switch_rate / rate);
  std::vector<char> lapse(static_cast<size_t>(t), 0);
  {
    char state = 0;
    for (Index i = 0; i < t; ++i) {
      if (rng.uniform() < p_switch) state = state ? 0 : 1;
      lapse[static_cast<size_t>(i)] = state;
    }
  }
  VectorXd f_eff_att(t), f_eff_un(t);
  Index n_lapse = 0;
  for (Index i = 0; i < t; ++i) {
    if (lapse[static_cast<size_t>(i)]) {
      f_eff_att(i) = f_un(i);
      f_eff_un(i) = f_att(i);
      ++n_lapse;
    } else {
      f_eff_att(i) = f_att(i);
      f_eff_un(i) = f_un(i);
    }
  }

  // ---- gaze synthesis: saccades whose rate follows the (effectively)
  // attended feature, plus feature-modulated smooth pursuit. ----
  const double cx = 960.0, cy = 540.0;
  double px = cx, py = cy;
  double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  MatrixXd gaze(t, 2);
  VectorXd sacc = VectorXd::Zero(t);
  std::vector<Index> onsets;
  const double base_rate = 2.0;  // saccades per second
  for (Index i = 0; i < t; ++i) {
    const double f_now =
        (lapse[static_cast<size_t>(i)] ? f_un(i) / mean_un : f_att(i) / mean_att);
    const double p_sacc = std::clamp(base_rate * (0.4 + 0.6 * f_now) / rate, 0.0, 0.5);
    if (rng.uniform() < p_sacc) {
      onsets.push_back(i);
      sacc(i) = 1.0;
      const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double amp = 30.0 + 90.0 * rng.uniform();
      px += amp * std::cos(theta) + 0.25 * (cx - px);
      py += amp * std::sin(theta) + 0.25 * (cy - py);
    } else {
      phi += 0.35 * rng.normal();
      const double speed = 1.2 * (0.4 + 0.6 * f_now);
      px += speed * std::cos(phi) + 0.002 * (cx - px);
      py += speed * std::sin(phi) + 0.002 * (cy - py);
    }
    px += 0.3 * rng.normal();
    py += 0.3 * rng.normal();
    px = std::clamp(px, 0.0, 1920.0);
    py = std::clamp(py, 0.0, 1080.0);
    gaze(i, 0) = px;
    gaze(i, 1) = py;
  }

  TimeSeries gaze_ts;
  gaze_ts.data = gaze;
  gaze_ts.rate = rate;
  gaze_ts.labels = {"gaze_a", "gaze_b"};
  TimeSeries gaze_v = features::eye_velocity(gaze_ts);
  TimeSeries sacc_ts;
  sacc_ts.data = sacc;
  sacc_ts.rate = rate;
  sacc_ts.labels = {"saccade"};

  // ---- EOG: gaze velocity components mirrored across electrode pairs plus
  // measurement noise. ----
  VectorXd dx = VectorXd::Zero(t), dy = VectorXd::Zero(t);
  for (Index i = 1; i < t; ++i) {
    dx(i) = gaze(i, 0) - gaze(i - 1, 0);
    dy(i) = gaze(i, 1) - gaze(i - 1, 1);
  }
  const VectorXd zdx = zscore(dx);
  const VectorXd zdy = zscore(dy);
  MatrixXd eog(t, 4);
  for (Index i = 0; i < t; ++i) {
    eog(i, 0) = 0.5 * zdx(i) + 0.3 * rng.normal();
    eog(i, 1) = -0.5 * zdx(i) + 0.3 * rng.normal();
    eog(i, 2) = 0.5 * zdy(i) + 0.3 * rng.normal();
    eog(i, 3) = -0.5 * zdy(i) + 0.3 * rng.normal();
  }
  TimeSeries eog_ts;
  eog_ts.data = eog;
  eog_ts.rate = rate;
  eog_ts.labels = {"eog_l", "eog_r", "eog_a", "eog_b"};
  TimeSeries eog_v = features::bipolar_eog(eog_ts);

  // ---- data channels: attended + unattended stimulus-following responses,
  // eye-velocity leakage, and colored noise at the requested SNR. ----
  const VectorXd lat_att = causal_conv(model.h_att, f_eff_att);
  const VectorXd lat_un = causal_conv(model.h_unatt, f_eff_un);
  const VectorXd confound = zscore(gaze_v.data.col(0));
  const int d = config.n_channels;
  MatrixXd signal = config.attended_gain * lat_att * model.topo_att.transpose() +
                    config.unattended_gain * lat_un * model.topo_unatt.transpose() +
                    config.confound_gain * confound * model.topo_eye.transpose();
  MatrixXd noise(t, d);
  for (int c = 0; c < d; ++c) noise.col(c) = colored_noise(t, config.noise_color, rng);
  const double p_sig = signal.squaredNorm() / static_cast<double>(t * d);
  const double p_noise_raw = noise.squaredNorm() / static_cast<double>(t * d);
  double noise_scale;
  if (p_sig > 0.0 && p_noise_raw > 0.0) {
    noise_scale = std::sqrt(p_sig / (p_noise_raw * std::pow(10.0, config.snr_db / 10.0)));
  } else if (p_noise_raw > 0.0) {
    noise_scale = 1.0 / std::sqrt(p_noise_raw);  // pure-noise dataset: unit power
  } else {
    noise_scale = 0.0;
  }

  TrialOut out;
  out.record.subject_id = subject_id;
  out.record.pair_id = pair_id;
  out.record.presentation = presentation;
  out.record.attended_object = attended;
  TimeSeries eeg;
  eeg.data = signal + noise_scale * noise;
  eeg.rate = rate;
  eeg.labels = channel_labels(d);
  out.record.modalities["EEG"] = std::move(eeg);
  out.record.modalities["EOG"] = std::move(eog_ts);
  out.record.modalities["EOG_V"] = std::move(eog_v);
  out.record.modalities["GAZE"] = std::move(gaze_ts);
  out.record.modalities["GAZE_V"] = std::move(gaze_v);
  out.record.modalities["SACC"] = std::move(sacc_ts);
  out.record.features[0] = features_pair[0];
  out.record.features[1] = features_pair[1];

  out.truth.subject_id = subject_id;
  out.truth.pair_id = pair_id;
  out.truth.presentation = presentation;
  out.truth.attended_object = attended;
  out.truth.latent_att = make_series(lat_att, rate, "latent_att");
  out.truth.latent_unatt = make_series(lat_un, rate, "latent_unatt");
  out.truth.confound = make_series(confound, rate, "confound");
  out.truth.signal_power = p_sig;
  out.truth.noise_power = noise_scale * noise_scale * p_noise_raw;
  out.truth.switch_fraction = static_cast<double>(n_lapse) / static_cast<double>(t);
  return out;
}

namespace {

std::array<TimeSeries, 2> pair_features(const SimConfig& config, int pair) {
  std::array<TimeSeries, 2> features;
  for (int obj = 1; obj <= 2; ++obj) {
    Rng rng = Rng::derived(config.seed, {kTagFeature, static_cast<std::uint64_t>(pair),
                                         static_cast<std::uint64_t>(obj)});
    features[static_cast<size_t>(obj - 1)] = gen_feature(config.trial_seconds, config.rate, rng);
  }
  return features;
}

}  // namespace

SimOutput gen_records(const SimConfig& config) {
  config.validate();
  SimOutput out;
  std::vector<std::array<TimeSeries, 2>> features;
  features.reserve(static_cast<size_t>(config.n_pairs));
  for (int p = 1; p <= config.n_pairs; ++p) features.push_back(pair_features(config, p));

  for (int s = 1; s <= config.n_subjects; ++s) {
    Rng model_rng = Rng::derived(config.seed, {kTagSubject, static_cast<std::uint64_t>(s)});
    SubjectModel model = gen_subject_model(config, model_rng);
    out.truth.subjects.push_back({s, model});
    for (int p = 1; p <= config.n_pairs; ++p) {
      for (int pres = 1; pres <= 2; ++pres) {
        Rng trial_rng = Rng::derived(
            config.seed, {kTagTrial, static_cast<std::uint64_t>(s),
                          static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(pres)});
        TrialOut trial =
            gen_subject_trial(features[static_cast<size_t>(p - 1)], pres, config, model, s, p,
                              pres, trial_rng);
        out.records.push_back(std::move(trial.record));
        out.truth.trials.push_back(std::move(trial.truth));
      }
    }
  }
  return out;
}

std::string gen_dataset(const SimConfig& config, const std::string& out_dir) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error("cannot create output directory " + out_dir + ": " + ec.message());

  io::DatasetManifest manifest;
  manifest.rate = config.rate;
  manifest.n_subjects = config.n_subjects;

  nlohmann::json audit;
  audit["generator"] = "attndec-sim v1";
  audit["subjects"] = nlohmann::json::array();
  audit["trials"] = nlohmann::json::array();

  std::vector<std::array<TimeSeries, 2>> features;
  features.reserve(static_cast<size_t>(config.n_pairs));
  for (int p = 1; p <= config.n_pairs; ++p) {
    features.push_back(pair_features(config, p));
    for (int obj = 1; obj <= 2; ++obj) {
      const std::string rel =
          "features/pair" + std::to_string(p) + "_obj" + std::to_string(obj) + ".mvts";
      io::write_matrix((fs::path(out_dir) / rel).string(),
                       features.back()[static_cast<size_t>(obj - 1)]);
    }
  }

  for (int s = 1; s <= config.n_subjects; ++s) {
    Rng model_rng = Rng::derived(config.seed, {kTagSubject, static_cast<std::uint64_t>(s)});
    SubjectModel model = gen_subject_model(config, model_rng);
    {
      nlohmann::json j;
      j["id"] = s;
      j["h_att"] = std::vector<double>(model.h_att.data(), model.h_att.data() + model.h_att.size());
      j["h_unatt"] =
          std::vector<double>(model.h_unatt.data(), model.h_unatt.data() + model.h_unatt.size());
      j["topo_att"] =
          std::vector<double>(model.topo_att.data(), model.topo_att.data() + model.topo_att.size());
      j["topo_unatt"] = std::vector<double>(model.topo_unatt.data(),
                                            model.topo_unatt.data() + model.topo_unatt.size());
      j["topo_eye"] =
          std::vector<double>(model.topo_eye.data(), model.topo_eye.data() + model.topo_eye.size());
      audit["subjects"].push_back(std::move(j));
    }
    for (int p = 1; p <= config.n_pairs; ++p) {
      for (int pres = 1; pres <= 2; ++pres) {
        Rng trial_rng = Rng::derived(
            config.seed, {kTagTrial, static_cast<std::uint64_t>(s),
                          static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(pres)});
        TrialOut trial =
            gen_subject_trial(features[static_cast<size_t>(p - 1)], pres, config, model, s, p,
                              pres, trial_rng);

        std::ostringstream dir;
        dir << "data/s" << std::setw(2) << std::setfill('0') << s << "_p" << p << "_" << pres;
        io::ManifestEntry entry;
        entry.subject_id = s;
        entry.pair_id = p;
        entry.presentation = pres;
        entry.attended_object = trial.record.attended_object;
        for (const auto& [name, series] : trial.record.modalities) {
          const std::string rel = dir.str() + "/" + name + ".mvts";
          io::write_matrix((fs::path(out_dir) / rel).string(), series);
          entry.modality_paths[name] = rel;
        }
        entry.feature_paths[0] = "features/pair" + std::to_string(p) + "_obj1.mvts";
        entry.feature_paths[1] = "features/pair" + std::to_string(p) + "_obj2.mvts";
        manifest.entries.push_back(std::move(entry));

        nlohmann::json j;
        j["subject"] = s;
        j["pair"] = p;
        j["presentation"] = pres;
        j["attended"] = trial.truth.attended_object;
        j["signal_power"] = trial.truth.signal_power;
        j["noise_power"] = trial.truth.noise_power;
        j["switch_fraction"] = trial.truth.switch_fraction;
        audit["trials"].push_back(std::move(j));
      }
    }
  }

  const std::string manifest_path = (fs::path(out_dir) / "manifest.txt").string();
  io::write_manifest(manifest_path, manifest);

  const fs::path audit_dir = fs::path(out_dir) / "ground_truth";
  fs::create_directories(audit_dir, ec);
  if (ec) throw io_error("cannot create " + audit_dir.string() + ": " + ec.message());
  std::ofstream audit_out(audit_dir / "audit.json", std::ios::trunc);
  if (!audit_out) throw io_error("cannot write " + (audit_dir / "audit.json").string());
  audit_out << audit.dump(2) << '\n';
  if (!audit_out) throw io_error("write failed: " + (audit_dir / "audit.json").string());
  return manifest_path;
}

}  // namespace attndec::simulate
