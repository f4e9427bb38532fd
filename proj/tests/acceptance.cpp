// Release gate for the attention-decoding toolkit. Each criterion prints one
// [PASS]/[FAIL] line (details indented below it); the process exits nonzero
// if any criterion fails. Checks cover the numerical core against
// independent oracles, the evaluation-protocol constants, end-to-end null
// calibration and sensitivity on synthetic forward-model data, directional
// findings the pipeline must reproduce, and byte-level determinism.
#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "attndec/cca.hpp"
#include "attndec/decoding.hpp"
#include "attndec/gcca.hpp"
#include "attndec/io.hpp"
#include "attndec/linalg.hpp"
#include "attndec/rng.hpp"
#include "attndec/simulate.hpp"
#include "attndec/stats.hpp"
#include "attndec/types.hpp"

namespace fs = std::filesystem;
using namespace attndec;
using clk = std::chrono::steady_clock;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return std::string(buf);
}

struct Check {
  std::vector<std::string> notes;     // informational, printed either way
  std::vector<std::string> problems;  // non-empty -> criterion fails

  void require(bool ok, std::string msg) {
    if (!ok) problems.push_back(std::move(msg));
  }
  void note(std::string msg) { notes.push_back(std::move(msg)); }
};

int g_failures = 0;

void criterion(int idx, const char* name, double budget_s,
               const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = clk::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.problems.push_back(fmt("unexpected exception: %s", e.what()));
  }
  const double elapsed = std::chrono::duration<double>(clk::now() - t0).count();
  if (budget_s > 0.0 && elapsed > budget_s)
    c.problems.push_back(fmt("runtime %.1f s exceeds the %.0f s budget", elapsed, budget_s));
  const bool pass = c.problems.empty();
  std::printf("[%s] %2d. %s  (%.1f s)\n", pass ? "PASS" : "FAIL", idx, name, elapsed);
  for (const std::string& n : c.notes) std::printf("         %s\n", n.c_str());
  for (const std::string& p : c.problems) std::printf("       ! %s\n", p.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// ---------------------------------------------------------------------------
// criterion 1: generalized symmetric eigensolver

void check_gevd(Check& c) {
  Rng rng(101);
  double worst_resid = 0.0, worst_orth = 0.0, worst_val = 0.0;
  for (int it = 0; it < 100; ++it) {
    const int n = 2 + static_cast<int>(rng.uniform_int(7));  // 2..8
    const Eigen::MatrixXd ra = random_matrix(n, n, rng);
    const Eigen::MatrixXd rb = random_matrix(n, n, rng);
    const Eigen::MatrixXd a =
        (ra.transpose() * ra / n + 0.05 * Eigen::MatrixXd::Identity(n, n)).eval();
    const Eigen::MatrixXd b =
        (rb.transpose() * rb / n + 0.05 * Eigen::MatrixXd::Identity(n, n)).eval();
    const linalg::Gevd g = linalg::sym_gevd(a, b, n);

    const double a_norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    const Eigen::MatrixXd resid =
        a * g.vectors - b * g.vectors * g.values.asDiagonal();
    worst_resid = std::max(worst_resid, resid.cwiseAbs().maxCoeff() / a_norm);
    const Eigen::MatrixXd orth =
        g.vectors.transpose() * b * g.vectors - Eigen::MatrixXd::Identity(n, n);
    worst_orth = std::max(worst_orth, orth.cwiseAbs().maxCoeff());

    // explicit-inverse oracle for the eigenvalues
    const Eigen::EigenSolver<Eigen::MatrixXd> es(b.inverse() * a);
    std::vector<double> oracle(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) oracle[static_cast<size_t>(i)] = es.eigenvalues()(i).real();
    std::sort(oracle.begin(), oracle.end(), std::greater<>());
    for (int i = 0; i < n; ++i) {
      const double ref = oracle[static_cast<size_t>(i)];
      worst_val = std::max(worst_val, std::abs(g.values(i) - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  c.require(worst_resid < 1e-8, fmt("eigen-residual %.2e >= 1e-8 * |A|_inf", worst_resid));
  c.require(worst_orth < 1e-8, fmt("B-orthonormality error %.2e >= 1e-8", worst_orth));
  c.require(worst_val < 1e-8, fmt("eigenvalue mismatch vs inverse oracle: %.2e", worst_val));
  c.note(fmt("100 random SPD pairs, n in [2,8]; worst residual %.1e, orth %.1e, values %.1e",
             worst_resid, worst_orth, worst_val));
}

// ---------------------------------------------------------------------------
// criterion 2: two-channel canonical correlation vs a brute-force grid

void check_cca_grid(Check& c) {
  Rng rng(202);
  const Eigen::Index t = 2000;

  // all direction pairs at 0.5 degree resolution, scored with two GEMMs
  const int n_dir = 360;
  Eigen::MatrixXd dirs(2, n_dir);
  for (int i = 0; i < n_dir; ++i) {
    const double th = std::numbers::pi * i / n_dir;  // [0, pi)
    dirs(0, i) = std::cos(th);
    dirs(1, i) = std::sin(th);
  }

  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const Eigen::VectorXd latent = random_matrix(t, 1, rng);
    Eigen::MatrixXd xd(t, 2), yd(t, 2);
    xd.col(0) = latent + 0.6 * random_matrix(t, 1, rng);
    xd.col(1) = 0.4 * latent + 0.9 * random_matrix(t, 1, rng);
    yd.col(0) = 0.8 * latent + 0.7 * random_matrix(t, 1, rng);
    yd.col(1) = random_matrix(t, 1, rng);

    const cca::CcaModel model = cca::fit_cca(make_series(xd, 30.0, "x"), make_series(yd, 30.0, "y"),
                                             LagSpec({0}), LagSpec({0}), 1);

    auto projected = [&](const Eigen::MatrixXd& m) {
      Eigen::MatrixXd p = m * dirs;
      for (int j = 0; j < n_dir; ++j) {
        p.col(j).array() -= p.col(j).mean();
        p.col(j) /= p.col(j).norm();
      }
      return p;
    };
    const Eigen::MatrixXd px = projected(xd);
    const Eigen::MatrixXd py = projected(yd);
    const double oracle = (px.transpose() * py).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::abs(model.train_corrs[0] - oracle));
  }
  c.require(worst < 2e-3, fmt("top correlation deviates %.2e >= 2e-3 from the grid search", worst));
  c.note(fmt("50 instances, T=2000, 0.5-degree grid; worst deviation %.1e", worst));
}

// ---------------------------------------------------------------------------
// criterion 3: confound-orthogonal projections after a partial fit

void check_pcca_orthogonality(Check& c) {
  Rng rng(303);
  const Eigen::Index t = 1500;
  const LagSpec lx({-1, 0, 1});
  const LagSpec ly({0});
  const LagSpec lc({-1, 0, 1});
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const Eigen::VectorXd latent = random_matrix(t, 1, rng);
    const Eigen::VectorXd nuisance = random_matrix(t, 1, rng);
    Eigen::MatrixXd xd(t, 3), yd(t, 2), cd(t, 2);
    xd.col(0) = latent + 0.5 * nuisance + 0.6 * random_matrix(t, 1, rng);
    xd.col(1) = 0.7 * nuisance + random_matrix(t, 1, rng);
    xd.col(2) = random_matrix(t, 1, rng);
    yd.col(0) = 0.8 * latent + 0.4 * nuisance + 0.7 * random_matrix(t, 1, rng);
    yd.col(1) = random_matrix(t, 1, rng);
    cd.col(0) = nuisance;
    cd.col(1) = 0.5 * nuisance + 0.5 * random_matrix(t, 1, rng);

    const TimeSeries x = make_series(xd, 30.0, "x");
    const TimeSeries y = make_series(yd, 30.0, "y");
    const cca::ConfoundSet conf{make_series(cd, 30.0, "c"), lc};
    const cca::CcaModel model = cca::fit_pcca(x, y, conf, lx, ly, 2);

    // the model's weights applied to residualized data must have no component
    // left along any lag-embedded confound column
    const Eigen::MatrixXd ec = linalg::lag_embed(linalg::center(conf.series), lc);
    const Eigen::MatrixXd ex =
        linalg::regress_out(linalg::lag_embed(linalg::center(x), lx), ec);
    const Eigen::MatrixXd px = ex * model.w_x;
    for (Eigen::Index j = 0; j < px.cols(); ++j) {
      for (Eigen::Index l = 0; l < ec.cols(); ++l) {
        const double dot = std::abs(px.col(j).dot(ec.col(l)));
        const double scale = px.col(j).norm() * ec.col(l).norm();
        if (scale > 0.0) worst = std::max(worst, dot / scale);
      }
    }
  }
  c.require(worst < 1e-8, fmt("residual-confound inner product %.2e >= 1e-8 * scale", worst));
  c.note(fmt("50 instances; worst normalized inner product %.1e", worst));

  // a zero-variance confound must reproduce the plain fit
  double worst_null = 0.0;
  for (int inst = 0; inst < 5; ++inst) {
    Eigen::MatrixXd xd(t, 2), yd(t, 2);
    const Eigen::VectorXd latent = random_matrix(t, 1, rng);
    xd.col(0) = latent + random_matrix(t, 1, rng);
    xd.col(1) = random_matrix(t, 1, rng);
    yd.col(0) = 0.7 * latent + random_matrix(t, 1, rng);
    yd.col(1) = random_matrix(t, 1, rng);
    const TimeSeries x = make_series(xd, 30.0, "x");
    const TimeSeries y = make_series(yd, 30.0, "y");
    const cca::ConfoundSet conf{make_series(Eigen::MatrixXd::Zero(t, 1), 30.0, "c"), lc};
    const cca::CcaModel plain = cca::fit_cca(x, y, lx, ly, 2);
    const cca::CcaModel part = cca::fit_pcca(x, y, conf, lx, ly, 2);
    worst_null = std::max(worst_null, (plain.w_x - part.w_x).cwiseAbs().maxCoeff());
    worst_null = std::max(worst_null, (plain.w_y - part.w_y).cwiseAbs().maxCoeff());
    for (size_t i = 0; i < plain.train_corrs.size(); ++i)
      worst_null = std::max(worst_null, std::abs(plain.train_corrs[i] - part.train_corrs[i]));
  }
  c.require(worst_null < 1e-10,
            fmt("null confounds deviate from the plain fit by %.2e >= 1e-10", worst_null));
}

// ---------------------------------------------------------------------------
// criterion 4: group analysis -- ISC identities and the block eigenproblem

void check_gcca(Check& c) {
  Rng rng(404);
  const Eigen::Index t = 800;
  const LagSpec lag({-1, 0, 1});

  // two views: ISC equals the Pearson correlation of the view projections
  {
    const Eigen::VectorXd latent = random_matrix(t, 1, rng);
    std::vector<TimeSeries> views;
    for (int v = 0; v < 2; ++v) {
      Eigen::MatrixXd d = random_matrix(t, 3, rng);
      d.col(0) += 2.0 * latent;
      views.push_back(make_series(d, 30.0, "v"));
    }
    const gcca::GccaModel model = gcca::fit_gcca(views, lag, 2);
    const Eigen::MatrixXd p0 = gcca::view_projection(model, views[0], 0);
    const Eigen::MatrixXd p1 = gcca::view_projection(model, views[1], 1);
    double worst = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
      const gcca::IscEntry e = gcca::isc(model, views, comp);
      worst = std::max(worst, std::abs(e.isc - linalg::pearson(p0.col(comp), p1.col(comp))));
    }
    c.require(worst < 1e-12, fmt("two-view ISC deviates %.2e >= 1e-12 from Pearson", worst));
  }

  // identical views: the leading component synchronizes perfectly
  {
    const TimeSeries v = make_series(random_matrix(t, 3, rng), 30.0, "v");
    const std::vector<TimeSeries> views{v, v, v};
    const gcca::GccaModel model = gcca::fit_gcca(views, lag, 1);
    const gcca::IscEntry e = gcca::isc(model, views, 0);
    c.require(std::abs(e.isc - 1.0) < 1e-8,
              fmt("identical views give ISC_1 = %.12f, off 1 by >= 1e-8", e.isc));
  }

  // the fitted stacked decoders satisfy the block eigenproblem R W = B W L
  {
    const Eigen::VectorXd latent = random_matrix(t, 1, rng);
    std::vector<TimeSeries> views;
    std::vector<Eigen::MatrixXd> embedded;
    for (int v = 0; v < 3; ++v) {
      Eigen::MatrixXd d = random_matrix(t, 3 + v % 2, rng);
      d.col(0) += 1.5 * latent;
      views.push_back(make_series(d, 30.0, "v"));
    }
    const int k = 3;
    const gcca::GccaModel model = gcca::fit_gcca(views, lag, k, 0.0);  // no ridge

    Eigen::Index total = 0;
    for (const auto& v : views) embedded.push_back(linalg::lag_embed(linalg::center(v), lag));
    for (const auto& e : embedded) total += e.cols();
    Eigen::MatrixXd z(t, total);
    std::vector<Eigen::Index> off;
    Eigen::Index o = 0;
    for (const auto& e : embedded) {
      off.push_back(o);
      z.middleCols(o, e.cols()) = e;
      o += e.cols();
    }
    Eigen::MatrixXd r = z.transpose() * z / static_cast<double>(t - 1);
    r = 0.5 * (r + r.transpose()).eval();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(total, total);
    for (size_t v = 0; v < embedded.size(); ++v) {
      const Eigen::Index d = embedded[v].cols();
      b.block(off[v], off[v], d, d) = r.block(off[v], off[v], d, d);
    }
    Eigen::MatrixXd w(total, k);
    for (size_t v = 0; v < embedded.size(); ++v)
      w.middleRows(off[v], embedded[v].cols()) = model.decoders[v];

    Eigen::VectorXd lambda(k);
    for (int j = 0; j < k; ++j) {
      const Eigen::VectorXd wj = w.col(j);
      lambda(j) = wj.dot(r * wj) / wj.dot(b * wj);
    }
    const double resid =
        (r * w - b * w * lambda.asDiagonal()).cwiseAbs().maxCoeff() /
        r.cwiseAbs().rowwise().sum().maxCoeff();
    c.require(resid < 1e-6, fmt("block eigen-residual %.2e >= 1e-6 * |R|_inf", resid));
    c.note(fmt("3 mixed-width views, k=3; block residual %.1e", resid));
  }
}

// ---------------------------------------------------------------------------
// criterion 5: statistics kernels

double oracle_wilcoxon_two_sided(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  const int n = static_cast<int>(d.size());
  std::vector<double> rank(d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    double r = 1.0, ties = 0.0;
    for (size_t j = 0; j < d.size(); ++j) {
      if (j == i) continue;
      if (std::abs(d[j]) < std::abs(d[i])) r += 1.0;
      if (std::abs(d[j]) == std::abs(d[i])) ties += 1.0;
    }
    rank[i] = r + ties / 2.0;
  }
  double w = 0.0;
  for (size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0.0) w += rank[i];
  const std::uint64_t total = 1ULL << n;
  std::uint64_t ge = 0, le = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1ULL << i)) s += rank[static_cast<size_t>(i)];
    if (s >= w) ++ge;
    if (s <= w) ++le;
  }
  const double pg = static_cast<double>(ge) / static_cast<double>(total);
  const double pl = static_cast<double>(le) / static_cast<double>(total);
  return std::min(1.0, 2.0 * std::min(pg, pl));
}

std::vector<double> magnitude_spectrum(const Eigen::VectorXd& x) {
  Eigen::FFT<double> fft;
  std::vector<double> in(x.data(), x.data() + x.size());
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  std::vector<double> mag(out.size());
  for (size_t i = 0; i < out.size(); ++i) mag[i] = std::abs(out[i]);
  return mag;
}

void check_stats(Check& c) {
  // signed-rank exact path vs full enumeration, ties included
  Rng rng(505);
  int cases = 0;
  double worst_p = 0.0;
  while (cases < 100) {
    const int n = 5 + static_cast<int>(rng.uniform_int(4));  // 5..8
    std::vector<double> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      a[static_cast<size_t>(i)] = std::round(rng.normal() * 4.0) / 4.0;
      b[static_cast<size_t>(i)] = std::round(rng.normal() * 4.0) / 4.0;
    }
    int nonzero = 0;
    for (int i = 0; i < n; ++i)
      if (a[static_cast<size_t>(i)] != b[static_cast<size_t>(i)]) ++nonzero;
    if (nonzero < 5) continue;
    ++cases;
    const stats::WilcoxonResult res = stats::wilcoxon_signed_rank(a, b);
    worst_p = std::max(worst_p, std::abs(res.p - oracle_wilcoxon_two_sided(a, b)));
    if (!res.exact) c.require(false, "exact path not taken for n <= 8");
  }
  c.require(worst_p < 1e-12, fmt("signed-rank p deviates %.2e >= 1e-12 from enumeration", worst_p));

  // step-up adjustment: the hand example, then monotonicity and bounds
  {
    const std::vector<double> adj = stats::bh_adjust({0.005, 0.01, 0.03, 0.04});
    const std::vector<double> want{0.02, 0.02, 0.04, 0.04};
    for (size_t i = 0; i < want.size(); ++i)
      c.require(std::abs(adj[i] - want[i]) < 1e-12,
                fmt("adjusted p[%zu] = %.4f, want %.4f", i, adj[i], want[i]));
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> p(8);
      for (double& v : p) v = rng.uniform();
      const std::vector<double> q = stats::bh_adjust(p);
      std::vector<size_t> order(p.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return p[i] < p[j]; });
      for (size_t i = 0; i + 1 < order.size(); ++i)
        c.require(q[order[i]] <= q[order[i + 1]] + 1e-15, "adjusted p not monotone in p");
      for (size_t i = 0; i < p.size(); ++i)
        c.require(q[i] >= p[i] - 1e-15 && q[i] <= 1.0 + 1e-15, "adjusted p out of bounds");
    }
  }

  // phase scrambling preserves per-channel magnitude spectra
  {
    Rng data_rng(506);
    double worst = 0.0;
    for (Eigen::Index t : {256, 255}) {
      const TimeSeries s = make_series(random_matrix(t, 2, data_rng), 30.0);
      Rng scramble_rng(99);
      const TimeSeries sc = stats::phase_scramble(s, scramble_rng);
      for (Eigen::Index ch = 0; ch < 2; ++ch) {
        const std::vector<double> m0 = magnitude_spectrum(s.data.col(ch));
        const std::vector<double> m1 = magnitude_spectrum(sc.data.col(ch));
        double scale = 0.0;
        for (double v : m0) scale = std::max(scale, v);
        for (size_t i = 0; i < m0.size(); ++i)
          worst = std::max(worst, std::abs(m0[i] - m1[i]) / scale);
      }
    }
    c.require(worst < 1e-9, fmt("magnitude spectrum deviates %.2e >= 1e-9 relative", worst));
  }
}

// ---------------------------------------------------------------------------
// criterion 6: protocol constants as shipped defaults

void check_protocol_defaults(Check& c) {
  const decoding::DecodeConfig dc;
  c.require(dc.segment_seconds == 30.0, fmt("segment length default %.1f != 30", dc.segment_seconds));
  c.require(dc.k == 5, fmt("component count default %d != 5", dc.k));
  c.require(dc.sum_components == 2, fmt("summed components default %d != 2", dc.sum_components));
  c.require(dc.n_surrogates == 500, fmt("surrogate count default %d != 500", dc.n_surrogates));
  c.require(dc.n_null_shifts == 100, fmt("null shift count default %d != 100", dc.n_null_shifts));

  std::vector<int> want_y(15);
  for (int i = 0; i < 15; ++i) want_y[static_cast<size_t>(i)] = -14 + i;
  c.require(cca::default_stimulus_lags().offsets == want_y, "stimulus lags are not {-14..0}");
  c.require(cca::default_data_lags().offsets == std::vector<int>({-1, 0, 1}),
            "data lags are not {-1,0,1}");
  c.require(gcca::default_view_lags().offsets == std::vector<int>({-2, -1, 0, 1, 2}),
            "view lags are not {-2..2}");

  // segments per record: floor(length / 3)
  Rng rng(606);
  c.require(decoding::bootstrap_segments(120.0, 30.0, rng).size() == 40,
            "120 s record does not yield 40 bootstrap segments");
  c.require(decoding::bootstrap_segments(91.0, 30.0, rng).size() == 30,
            "91 s record does not yield floor(91/3) = 30 segments");

  // one fold per stimulus pair
  std::vector<decoding::TrialRecord> records;
  const TimeSeries feat = make_series(Eigen::MatrixXd::Ones(60, 1), 30.0, "motion");
  const TimeSeries data = make_series(Eigen::MatrixXd::Zero(60, 2), 30.0, "ch");
  for (int pair = 1; pair <= 7; ++pair) {
    for (int pres = 1; pres <= 2; ++pres) {
      decoding::TrialRecord r;
      r.subject_id = 1;
      r.pair_id = pair;
      r.presentation = pres;
      r.attended_object = pres;
      r.modalities["EEG"] = data;
      r.features = {feat, feat};
      records.push_back(std::move(r));
    }
  }
  c.require(decoding::loo_pair_split(records).size() == 7,
            "7 stimulus pairs do not split into 7 folds");

  // two-tailed alpha 0.05 -> interpolated 97.5th percentile of the null
  c.require(stats::kDefaultAlpha == 0.05, "default alpha != 0.05");
  stats::NullDistribution null;
  for (int i = 1; i <= 100; ++i) null.values.push_back(static_cast<double>(i));
  const double thr = stats::significance_threshold(null);
  c.require(std::abs(thr - 97.525) < 1e-12,
            fmt("97.5th percentile of {1..100} = %.6f, want 97.525", thr));
}

// ---------------------------------------------------------------------------
// criteria 7-9: end-to-end runs on synthetic forward-model data

simulate::SimConfig full_scale_config() {
  simulate::SimConfig c;
  c.n_subjects = 19;
  c.n_pairs = 7;
  c.trial_seconds = 120.0;
  c.n_channels = 64;
  c.seed = 20260819;
  return c;
}

decoding::DecodeConfig gate_decode_config(int null_shifts) {
  decoding::DecodeConfig dc;
  dc.task = decoding::Task::svad;
  dc.n_surrogates = 0;  // the accuracy criteria use the circular-shift null only
  dc.n_null_shifts = null_shifts;
  dc.seed = 7;
  return dc;
}

void check_null_calibration(Check& c) {
  simulate::SimConfig cfg = full_scale_config();
  cfg.attended_gain = 0.0;  // the only equal-gain setting with no pathway cue:
  cfg.unattended_gain = 0.0;  // recorded channels carry noise only
  const simulate::SimOutput sim = simulate::gen_records(cfg);
  const decoding::DecodeReport rep = decoding::run_task(sim.records, gate_decode_config(100));

  // 95% binomial interval around chance; the independent unit is one
  // non-overlapping 30 s window: 19 subjects x 7 folds x 2 records x 4
  const double n_eff = 19.0 * 7.0 * 2.0 * (120.0 / 30.0);
  const double half = 1.96 * std::sqrt(0.25 / n_eff);
  double null_mean = 0.0;
  for (double v : rep.pooled_null) null_mean += v;
  null_mean /= static_cast<double>(rep.pooled_null.size());

  c.require(rep.n_failed_folds == 0, fmt("%d folds failed", rep.n_failed_folds));
  c.require(std::abs(rep.mean_accuracy - 0.5) < half,
            fmt("mean accuracy %.4f outside 0.5 +/- %.4f", rep.mean_accuracy, half));
  c.require(std::abs(null_mean - 0.5) < half,
            fmt("circular-null mean %.4f outside 0.5 +/- %.4f", null_mean, half));
  c.note(fmt("accuracy %.4f, null mean %.4f, interval 0.5 +/- %.4f (n_eff = %.0f)",
             rep.mean_accuracy, null_mean, half, n_eff));
}

// shared between criteria 8 and 9a so the heaviest dataset is built once
struct SweepCache {
  std::optional<simulate::SimOutput> strong_distractor;  // g_u = 1 at the sweep SNR
  double strong_distractor_svad = 0.0;
};
SweepCache g_sweep;

void check_sensitivity(Check& c) {
  // detection: equal-seed dataset at SNR 0 dB, 1:0.25 gain ratio, with the
  // per-subject circular-shift null
  {
    simulate::SimConfig cfg = full_scale_config();
    cfg.snr_db = 0.0;
    cfg.unattended_gain = 0.25;
    const simulate::SimOutput sim = simulate::gen_records(cfg);
    const decoding::DecodeReport rep = decoding::run_task(sim.records, gate_decode_config(100));
    stats::NullDistribution pooled;
    pooled.values = rep.pooled_null;
    const double thr = stats::significance_threshold(pooled);
    c.require(rep.mean_accuracy > thr,
              fmt("accuracy %.4f does not exceed the null 97.5th percentile %.4f",
                  rep.mean_accuracy, thr));
    c.note(fmt("SNR 0 dB: accuracy %.4f vs null 97.5th percentile %.4f", rep.mean_accuracy, thr));
  }

  // monotonicity: the task saturates at SNR 0 dB (every gain ratio decodes
  // perfectly), so the ordering is measured in the sensitive regime
  const double sweep_snr = -20.0;
  std::vector<double> accs;
  for (const double gu : {0.0, 0.25, 0.5, 1.0}) {
    simulate::SimConfig cfg = full_scale_config();
    cfg.snr_db = sweep_snr;
    cfg.unattended_gain = gu;
    simulate::SimOutput sim = simulate::gen_records(cfg);
    const decoding::DecodeReport rep = decoding::run_task(sim.records, gate_decode_config(0));
    accs.push_back(rep.mean_accuracy);
    if (gu == 1.0) {
      g_sweep.strong_distractor = std::move(sim);
      g_sweep.strong_distractor_svad = rep.mean_accuracy;
    }
  }
  c.note(fmt("SNR %.0f dB sweep over distractor gain {0, 0.25, 0.5, 1}: "
             "%.4f, %.4f, %.4f, %.4f",
             sweep_snr, accs[0], accs[1], accs[2], accs[3]));
  for (size_t i = 0; i + 1 < accs.size(); ++i) {
    c.require(accs[i] > accs[i + 1],
              fmt("accuracy not strictly decreasing at step %zu (%.4f -> %.4f)", i, accs[i],
                  accs[i + 1]));
  }
}

void check_directional_findings(Check& c) {
  // (a) matching against an unobserved segment is at least as easy as
  // rejecting the concurrently encoded distractor
  {
    if (!g_sweep.strong_distractor) {
      simulate::SimConfig cfg = full_scale_config();
      cfg.snr_db = -20.0;
      cfg.unattended_gain = 1.0;
      simulate::SimOutput sim = simulate::gen_records(cfg);
      const decoding::DecodeReport svad = decoding::run_task(sim.records, gate_decode_config(0));
      g_sweep.strong_distractor = std::move(sim);
      g_sweep.strong_distractor_svad = svad.mean_accuracy;
    }
    decoding::DecodeConfig dc = gate_decode_config(0);
    dc.task = decoding::Task::mm;
    const decoding::DecodeReport mm =
        decoding::run_task(g_sweep.strong_distractor->records, dc);
    c.require(mm.mean_accuracy >= g_sweep.strong_distractor_svad,
              fmt("match-mismatch %.4f below selective-attention %.4f", mm.mean_accuracy,
                  g_sweep.strong_distractor_svad));
    c.note(fmt("match-mismatch %.4f vs selective-attention %.4f (distractor gain 1, -20 dB)",
               mm.mean_accuracy, g_sweep.strong_distractor_svad));
    g_sweep.strong_distractor.reset();
  }

  // (b) with the neural pathway dominant, regressing the eye-velocity
  // confound out of both sides costs less than 5 accuracy points
  {
    simulate::SimConfig cfg = full_scale_config();
    cfg.snr_db = -20.0;
    cfg.unattended_gain = 0.25;
    cfg.confound_gain = 0.3;
    const simulate::SimOutput sim = simulate::gen_records(cfg);
    decoding::DecodeConfig dc = gate_decode_config(0);
    const decoding::DecodeReport plain = decoding::run_task(sim.records, dc);
    dc.confound_mode = decoding::ConfoundMode::regress;
    const decoding::DecodeReport part = decoding::run_task(sim.records, dc);
    const double drop = plain.mean_accuracy - part.mean_accuracy;
    c.require(drop < 0.05, fmt("confound regression drops accuracy by %.4f >= 0.05", drop));
    c.note(fmt("plain %.4f, confound-regressed %.4f (drop %.4f)", plain.mean_accuracy,
               part.mean_accuracy, drop));
  }

  // (c) cross-validated synchrony of the leading group component drops when
  // per-subject attention lapses are switched on
  {
    auto isc_at = [&](double switch_rate) {
      simulate::SimConfig cfg;
      cfg.n_subjects = 6;
      cfg.n_pairs = 3;
      cfg.trial_seconds = 60.0;
      cfg.n_channels = 16;
      cfg.snr_db = 0.0;
      cfg.unattended_gain = 0.25;
      cfg.seed = 20260819;
      cfg.distractor_switch_rate = switch_rate;
      const simulate::SimOutput sim = simulate::gen_records(cfg);
      double isc_sum = 0.0;
      int n_eval = 0;
      for (int test_pair = 1; test_pair <= cfg.n_pairs; ++test_pair) {
        std::vector<std::vector<TimeSeries>> train;
        for (int pair = 1; pair <= cfg.n_pairs; ++pair) {
          if (pair == test_pair) continue;
          for (int pres = 1; pres <= 2; ++pres) {
            std::vector<TimeSeries> views;
            for (const auto& r : sim.records)
              if (r.pair_id == pair && r.presentation == pres)
                views.push_back(r.modality("EEG"));
            train.push_back(std::move(views));
          }
        }
        const gcca::GccaModel model =
            gcca::fit_gcca_segments(train, gcca::default_view_lags(), 5);
        for (int pres = 1; pres <= 2; ++pres) {
          std::vector<TimeSeries> views;
          for (const auto& r : sim.records)
            if (r.pair_id == test_pair && r.presentation == pres)
              views.push_back(r.modality("EEG"));
          isc_sum += gcca::isc(model, views, 0).isc;
          ++n_eval;
        }
      }
      return isc_sum / n_eval;
    };
    const double isc_stable = isc_at(0.0);
    const double isc_lapsing = isc_at(0.5);
    c.require(isc_lapsing < isc_stable - 0.02,
              fmt("ISC_1 did not decrease under lapses: %.4f vs %.4f", isc_lapsing, isc_stable));
    c.note(fmt("held-out ISC_1 %.4f stable vs %.4f with lapses", isc_stable, isc_lapsing));
  }
}

// ---------------------------------------------------------------------------
// criterion 10: determinism

bool same_file(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  const std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  return ca == cb;
}

std::vector<fs::path> tree_files(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  std::sort(out.begin(), out.end());
  return out;
}

bool reports_equal(const decoding::DecodeReport& a, const decoding::DecodeReport& b) {
  if (a.mean_accuracy != b.mean_accuracy || a.pooled_null != b.pooled_null ||
      a.pooled_null_mean != b.pooled_null_mean ||
      a.pooled_null_threshold != b.pooled_null_threshold ||
      a.n_failed_folds != b.n_failed_folds || a.folds.size() != b.folds.size() ||
      a.decisions.size() != b.decisions.size() || a.subjects.size() != b.subjects.size())
    return false;
  for (size_t i = 0; i < a.folds.size(); ++i) {
    const auto& fa = a.folds[i];
    const auto& fb = b.folds[i];
    if (fa.subject_id != fb.subject_id || fa.pair_id != fb.pair_id || fa.failed != fb.failed ||
        fa.n_trials != fb.n_trials || fa.n_correct != fb.n_correct ||
        fa.train_corrs != fb.train_corrs || fa.corr_observed != fb.corr_observed ||
        fa.corr_null != fb.corr_null || fa.null_correct != fb.null_correct)
      return false;
  }
  for (size_t i = 0; i < a.decisions.size(); ++i) {
    const auto& da = a.decisions[i];
    const auto& db = b.decisions[i];
    if (da.subject_id != db.subject_id || da.pair_id != db.pair_id ||
        da.presentation != db.presentation || da.segment_index != db.segment_index ||
        da.start_s != db.start_s || da.score_target != db.score_target ||
        da.score_imposter != db.score_imposter || da.correct != db.correct)
      return false;
  }
  for (size_t i = 0; i < a.subjects.size(); ++i) {
    const auto& sa = a.subjects[i];
    const auto& sb = b.subjects[i];
    if (sa.subject_id != sb.subject_id || sa.n_trials != sb.n_trials ||
        sa.n_correct != sb.n_correct || sa.accuracy != sb.accuracy ||
        sa.null_values != sb.null_values || sa.p != sb.p)
      return false;
  }
  return true;
}

void check_determinism(Check& c) {
  const fs::path base =
      fs::temp_directory_path() / ("attndec_gate_" + std::to_string(::getpid()));
  fs::create_directories(base);

  simulate::SimConfig cfg;
  cfg.n_subjects = 2;
  cfg.n_pairs = 2;
  cfg.trial_seconds = 45.0;
  cfg.n_channels = 8;
  cfg.snr_db = 0.0;
  cfg.unattended_gain = 0.25;
  cfg.seed = 77;

  // dataset generation: two runs, identical trees byte for byte
  simulate::gen_dataset(cfg, (base / "ds_a").string());
  simulate::gen_dataset(cfg, (base / "ds_b").string());
  const std::vector<fs::path> fa = tree_files(base / "ds_a");
  const std::vector<fs::path> fb = tree_files(base / "ds_b");
  c.require(!fa.empty(), "dataset generation produced no files");
  c.require(fa == fb, "the two generated datasets list different files");
  if (fa == fb) {
    for (const fs::path& rel : fa)
      c.require(same_file(base / "ds_a" / rel, base / "ds_b" / rel),
                fmt("dataset file %s differs between runs", rel.string().c_str()));
  }
  c.note(fmt("%zu dataset files byte-identical across two runs", fa.size()));

  // decoding: two runs and a 4-worker run agree bitwise, in memory and on disk
  const simulate::SimOutput sim = simulate::gen_records(cfg);
  decoding::DecodeConfig dc;
  dc.task = decoding::Task::svad;
  dc.n_surrogates = 20;
  dc.n_null_shifts = 10;
  dc.seed = 3;
  dc.workers = 1;
  const decoding::DecodeReport r1 = decoding::run_task(sim.records, dc);
  const decoding::DecodeReport r2 = decoding::run_task(sim.records, dc);
  dc.workers = 4;
  const decoding::DecodeReport r4 = decoding::run_task(sim.records, dc);
  c.require(reports_equal(r1, r2), "repeated runs differ");
  c.require(reports_equal(r1, r4), "1-worker and 4-worker runs differ");

  io::write_decode_report((base / "rep_1.txt").string(), r1);
  io::write_decode_report((base / "rep_4.txt").string(), r4);
  c.require(same_file(base / "rep_1.txt", base / "rep_4.txt"),
            "written reports differ across worker counts");

  std::error_code ec;
  fs::remove_all(base, ec);
}

}  // namespace

int main() {
  std::printf("release gate: stimulus-informed attention decoding\n");
  criterion(1, "generalized eigensolver matches the explicit-inverse oracle", 5.0, check_gevd);
  criterion(2, "canonical correlation matches a brute-force weight search", 30.0, check_cca_grid);
  criterion(3, "partial fits project orthogonally to their confounds", 0.0,
            check_pcca_orthogonality);
  criterion(4, "group analysis: ISC identities and the block eigenproblem", 0.0, check_gcca);
  criterion(5, "statistics kernels match enumeration and spectral oracles", 0.0, check_stats);
  criterion(6, "protocol constants are the shipped defaults", 0.0, check_protocol_defaults);
  criterion(7, "uninformative data decodes at chance with a centered null", 180.0,
            check_null_calibration);
  criterion(8, "informative data beats its null; gain response is monotone", 600.0,
            check_sensitivity);
  criterion(9, "directional findings: matching, confounds, synchrony", 0.0,
            check_directional_findings);
  criterion(10, "datasets and reports are byte-stable across runs and workers", 0.0,
            check_determinism);

  if (g_failures == 0) {
    std::printf("all 10 criteria passed\n");
    return 0;
  }
  std::printf("%d of 10 criteria FAILED\n", g_failures);
  return 1;
}
