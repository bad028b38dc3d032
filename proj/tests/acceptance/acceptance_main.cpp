// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "qrnn/data.hpp"
#include "qrnn/depth.hpp"
#include "qrnn/encoding.hpp"
#include "qrnn/enqode.hpp"
#include "qrnn/mapping.hpp"
#include "qrnn/optim.hpp"
#include "qrnn/qrnn.hpp"
#include "qrnn/simulator.hpp"
#include "qrnn/training.hpp"
#include "qrnn_forge/commands.hpp"

using namespace qrnn;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kQspFidelity = 1 - 1e-10;
constexpr double kQspSeconds = 5.0;
constexpr double kAngleTol = 1e-12;
constexpr double kStructureTv = 1e-9;
constexpr double kResetSigmas = 3.0;
constexpr std::uint64_t kResetShots = 10000;
constexpr double kEnqodeFid2 = 0.88;
constexpr double kEnqodeFid3 = 0.80;
constexpr double kRefineSlack = 1e-9;
constexpr double kEnqodeSeconds = 120.0;
constexpr double kQspDepthRatio = 1.8;
constexpr double kAdamTol = 1e-12;
constexpr double kSpsaRelTol = 0.05;
constexpr double kSpsaSignificant = 0.1;
constexpr double kTrainRatio = 0.5;
constexpr double kTrainSeconds = 600.0;
constexpr double kMappingTol = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome amplitude_encoding() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> dim(2, 32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 1.0;
  for (int i = 0; i < 200; ++i) {
    FeatureRow x(dim(rng));
    for (double& v : x) v = u(rng);
    if (i % 4 == 0) x[rng() % x.size()] = 0.0;
    x = normalize_l2(x);
    const Circuit c = amplitude_qsp(x);
    const oracle::Vec s = oracle::state(c);
    oracle::Vec target = oracle::Vec::Zero(s.size());
    for (std::size_t k = 0; k < x.size(); ++k) target(static_cast<Eigen::Index>(k)) = x[k];
    worst = std::min(worst, oracle::fidelity(target, s));
  }
  const double secs = seconds_since(t0);
  return {worst >= kQspFidelity && secs < kQspSeconds,
          "min fidelity " + fmt("%.15f", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome angle_encoding() {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> width(1, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    FeatureRow x(static_cast<std::size_t>(width(rng)));
    for (double& v : x) v = u(rng);
    const StateVector s = simulate(angle_feature_map(x));
    for (std::size_t b = 0; b < s.dimension(); ++b) {
      double amp = 1.0;
      for (std::size_t q = 0; q < x.size(); ++q) {
        amp *= ((b >> q) & 1U) ? std::sin(x[q] / 2) : std::cos(x[q] / 2);
      }
      worst = std::max(worst, std::abs(s[b] - cplx{amp, 0.0}));
    }
  }
  return {worst <= kAngleTol, "max amplitude error " + fmt("%.3e", worst)};
}

Outcome structure_equivalence() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    QrnnConfig cfg;
    cfg.n_h = 1 + static_cast<int>(rng() % 3);
    cfg.n_f = 1 + static_cast<int>(rng() % 2);
    const int steps = 1 + static_cast<int>(rng() % 4);
    const bool angle_enc = i % 2 == 1;
    cfg.encoding = angle_enc ? EncodingKind::Angle : EncodingKind::AmplitudeExact;
    const std::size_t features = angle_enc ? static_cast<std::size_t>(cfg.n_f) : std::size_t{1} << cfg.n_f;
    cfg.target_feature_index = static_cast<int>(rng() % features);
    std::vector<double> params(param_count(cfg));
    for (double& p : params) p = angle(rng);
    Sequence seq(static_cast<std::size_t>(steps), FeatureRow(features));
    for (auto& row : seq) {
      for (double& v : row) v = u(rng);
    }
    std::vector<Circuit> maps;
    if (angle_enc) {
      maps = encode_sequence(cfg, seq, AngleFeatureMap(features));
    } else {
      maps = encode_sequence(cfg, seq, AmplitudeFeatureMap(features));
    }
    const Distribution a = run_exact(build_canonical(cfg, params, maps));
    const Distribution b = run_exact(build_alternating(cfg, params, maps));
    worst = std::max(worst, total_variation(a, b));
  }
  return {worst < kStructureTv, "max total variation " + fmt("%.3e", worst)};
}

Outcome reset_correctness() {
  std::mt19937_64 rng(104);
  double worst_z = 0.0;
  std::size_t checked = 0;
  for (int i = 0; i < 10; ++i) {
    const int n = 3 + i % 2;
    Circuit c = oracle::random_circuit(rng, n, 24, 2 + i % 3);
    c.set_measured_qubits({0, n - 1});
    const Distribution exact = run_exact(c);
    const Counts counts = sample(c, kResetShots, 5000 + static_cast<std::uint64_t>(i));
    const auto freq = frequencies(counts, 2);
    for (std::size_t k = 0; k < freq.size(); ++k) {
      const double p = exact.probs[k];
      const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(kResetShots));
      const double diff = std::abs(freq[k] - p);
      const double z = sigma > 0 ? diff / sigma : (diff > 0 ? 1e300 : 0.0);
      worst_z = std::max(worst_z, z);
      ++checked;
    }
  }
  return {worst_z <= kResetSigmas,
          std::to_string(checked) + " outcome probabilities, max deviation " + fmt("%.2f", worst_z) + " sigma"};
}

FeatureMatrix fidelity_rows(const FeatureMatrix& augmented, int qubits) {
  const std::size_t dim = std::size_t{1} << qubits;
  FeatureMatrix rows;
  for (const auto& r : stack_lags(augmented, dim)) rows.push_back(normalize_l2(r));
  return rows;
}

Outcome enqode_fidelity() {
  const auto t0 = Clock::now();
  const FeatureTable table = compute_features(synthetic(3, 601), FeatureSpec::Yahoo3);
  const FeatureMatrix scaled = apply_scaler(fit_scaler(table.rows), table.rows);
  const FeatureMatrix augmented = augment_amplitude_feature(scaled, AmplitudeScaling::MaxMin);
  bool pass = true;
  std::string detail = std::to_string(table.rows.size()) + " rows;";
  double worst_refine = 0.0;
  for (const auto& [qubits, threshold] : {std::pair{2, kEnqodeFid2}, std::pair{3, kEnqodeFid3}}) {
    const FeatureMatrix rows = fidelity_rows(augmented, qubits);
    EnqodeFitConfig cfg;
    cfg.layers = qubits;
    const EnqodeModel model = fit_enqode(rows, qubits, cfg);
    double plain = 0.0;
    double refined = 0.0;
    for (const auto& r : rows) {
      const double f0 = encode_sample(model, r, false).fidelity;
      const double f1 = encode_sample(model, r, true).fidelity;
      plain += f0;
      refined += f1;
      worst_refine = std::max(worst_refine, f0 - f1);
    }
    plain /= static_cast<double>(rows.size());
    refined /= static_cast<double>(rows.size());
    pass = pass && plain >= threshold && refined >= threshold;
    detail += " (" + std::to_string(qubits) + "q," + std::to_string(qubits) + "L) mean " + fmt("%.4f", plain) +
              " refined " + fmt("%.4f", refined) + " >= " + fmt("%.2f", threshold) + ";";
  }
  pass = pass && worst_refine <= kRefineSlack;
  const double secs = seconds_since(t0);
  pass = pass && secs < kEnqodeSeconds;
  return {pass, detail + " worst refine loss " + fmt("%.1e", worst_refine) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome depth_scaling() {
  DepthScanConfig cfg;
  cfg.n_f_min = 2;
  cfg.n_f_max = 5;
  bool pass = true;
  std::string detail;
  auto depth_of = [](const std::vector<DepthRow>& rows, int n_f, EncodingKind e, StructureKind s) {
    for (const auto& r : rows) {
      if (r.n_f == n_f && r.encoding == e && r.structure == s) return r.depth;
    }
    return -1;
  };

  const auto rows = depth_scan(cfg);
  double min_ratio = 1e300;
  for (StructureKind s : {StructureKind::Canonical, StructureKind::AlternatingF}) {
    for (int n = 3; n < 5; ++n) {
      const double ratio = static_cast<double>(depth_of(rows, n + 1, EncodingKind::AmplitudeExact, s)) /
                           depth_of(rows, n, EncodingKind::AmplitudeExact, s);
      min_ratio = std::min(min_ratio, ratio);
    }
  }
  pass = pass && min_ratio >= kQspDepthRatio;
  detail += "min exact-QSP ratio " + fmt("%.3f", min_ratio);

  // Successive differences at n_f = 3, 4, 5. C is fitted on the first one;
  // the later ones must stay under C * n_f.
  auto worst_growth = [&](EncodingKind e) {
    double worst = 0.0;
    for (StructureKind s : {StructureKind::Canonical, StructureKind::AlternatingF}) {
      auto diff = [&](int n) { return static_cast<double>(depth_of(rows, n, e, s) - depth_of(rows, n - 1, e, s)); };
      const double c = diff(3) / 3.0;
      for (int n = 4; n <= 5; ++n) worst = std::max(worst, diff(n) / (c * n));
    }
    return worst;
  };
  const double enqode_growth = worst_growth(EncodingKind::Enqode);
  pass = pass && enqode_growth <= 1.0;
  detail += ", EnQode max diff/(C n_f) " + fmt("%.3f", enqode_growth) + " (exact QSP " +
            fmt("%.3f", worst_growth(EncodingKind::AmplitudeExact)) + ")";

  int violations = 0;
  int points = 0;
  for (int T = 2; T <= 4; ++T) {
    DepthScanConfig scan = cfg;
    scan.sequence_length = T;
    const auto r = T == cfg.sequence_length ? rows : depth_scan(scan);
    for (int n = cfg.n_f_min; n <= cfg.n_f_max; ++n) {
      for (EncodingKind e : cfg.encodings) {
        ++points;
        if (depth_of(r, n, e, StructureKind::AlternatingF) > depth_of(r, n, e, StructureKind::Canonical)) {
          ++violations;
        }
      }
    }
  }
  pass = pass && violations == 0;
  detail += ", alternating <= canonical at " + std::to_string(points - violations) + "/" + std::to_string(points) +
            " points (T = 2..4)";
  return {pass, detail};
}

Outcome optimizer_correctness() {
  // Adam with g1 = 1, g2 = 3 at lr 0.03, hand-derived.
  AdamState s(1);
  std::vector<double> p{0.0};
  adam_step(s, std::vector<double>{1.0}, p, 0.03);
  adam_step(s, std::vector<double>{3.0}, p, 0.03);
  const double expected = -0.03 / (1.0 + 1e-8) - 0.03 * (0.39 / 0.19) / (std::sqrt(0.009999 / 0.001999) + 1e-8);
  const double adam_err = std::abs(p[0] - expected);

  // SPSA on a quadratic bowl. Component i of one estimate has variance
  // sum_{j != i} g_j^2, so the 5% check is run where that spread is small
  // against the significant component, and the general case is held to four
  // analytic standard errors.
  auto spsa_mean = [](const std::vector<double>& a, const std::vector<double>& x, std::uint64_t seed) {
    const LossFn bowl = [&](std::span<const double> v) {
      double l = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) l += 0.5 * a[i] * v[i] * v[i];
      return l;
    };
    Rng rng(seed);
    std::vector<double> mean(x.size(), 0.0);
    for (int k = 0; k < 500; ++k) {
      const auto g = spsa_gradient(bowl, x, 0.001, rng);
      for (std::size_t i = 0; i < x.size(); ++i) mean[i] += g[i] / 500;
    }
    return mean;
  };
  const std::vector<double> a{2.0, 1.0, 0.5, 1.5};
  const std::vector<double> x{0.6, 0.08, -0.12, 0.03};
  const auto m = spsa_mean(a, x, 2024);
  double worst_rel = 0.0;
  int significant = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = a[i] * x[i];
    if (std::abs(g) <= kSpsaSignificant) continue;
    ++significant;
    worst_rel = std::max(worst_rel, std::abs(m[i] - g) / std::abs(g));
  }
  const std::vector<double> x2{0.4, -0.7, 1.1, 0.5};
  const auto m2 = spsa_mean(a, x2, 2025);
  double worst_z = 0.0;
  for (std::size_t i = 0; i < x2.size(); ++i) {
    double var = 0.0;
    for (std::size_t j = 0; j < x2.size(); ++j) {
      if (j != i) var += std::pow(a[j] * x2[j], 2);
    }
    worst_z = std::max(worst_z, std::abs(m2[i] - a[i] * x2[i]) / std::sqrt(var / 500));
  }
  const bool pass = adam_err <= kAdamTol && significant > 0 && worst_rel <= kSpsaRelTol && worst_z <= 4.0;
  return {pass, "Adam error " + fmt("%.1e", adam_err) + ", SPSA max relative error " + fmt("%.4f", worst_rel) +
                    " over " + std::to_string(significant) + " significant component(s), general bowl max " +
                    fmt("%.2f", worst_z) + " standard errors"};
}

Outcome training_sanity() {
  const auto t0 = Clock::now();
  // 133 rows -> 125 windows of T = 8 -> 100 training sequences.
  const FeatureTable table = synthetic_ar1(1, 133, 3);
  DatasetOptions o;
  o.sequence_length = 8;
  const PreparedDataset ds = prepare_dataset(table, o);
  AmplitudeFeatureMap enc(ds.n_features);
  QrnnConfig qc;
  qc.n_h = 3;
  qc.n_f = QrnnConfig::feature_qubits(EncodingKind::AmplitudeExact, ds.n_features);
  bool pass = ds.samples.train.size() == 100;
  std::string detail = std::to_string(ds.samples.train.size()) + " sequences; final/initial:";
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TrainConfig tc;
    tc.epochs = 50;
    tc.learning_rate = 0.03;
    tc.spsa_step = 0.001;
    tc.seed = seed;
    const TrainResult r = train(make_model(qc, ds.target_scale, seed), ds.samples.train, enc, tc);
    const double ratio = r.final_loss / r.curve.front();
    pass = pass && ratio <= kTrainRatio;
    detail += " " + fmt("%.3f", ratio);
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < kTrainSeconds;
  return {pass, detail + " (seeds 0-4), " + fmt("%.1f", secs) + " s"};
}

Outcome maxmin_ordering() {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // The pair sits inside a background dataset that fixes the amplitude column's scale.
    FeatureMatrix rows(30, FeatureRow(3));
    for (auto& r : rows) {
      for (double& v : r) v = u(rng);
    }
    FeatureRow dir(3);
    for (double& v : dir) v = u(rng);
    const double n_dir = l2_norm(dir);
    const double big = 1.5 * u(rng);
    const double small = big * std::uniform_real_distribution<double>(0.1, 0.95)(rng);
    FeatureRow a = dir;
    FeatureRow b = dir;
    for (double& v : a) v *= big / n_dir;
    for (double& v : b) v *= small / n_dir;
    rows.push_back(a);
    rows.push_back(b);
    const FeatureMatrix aug = augment_amplitude_feature(rows, AmplitudeScaling::MaxMin);
    const FeatureRow ea = normalize_l2(aug[aug.size() - 2]);
    const FeatureRow eb = normalize_l2(aug.back());
    bool ordered = true;
    for (std::size_t i = 0; i < 3; ++i) ordered = ordered && ea[i] > eb[i];
    ok += ordered ? 1 : 0;
  }
  return {ok == 100, std::to_string(ok) + "/100 pairs strictly ordered"};
}

Outcome mapping_inverse() {
  std::mt19937_64 rng(110);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> width(1e-3, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lo = u(rng);
    const double hi = lo + width(rng);
    const double x = lo + (hi - lo) * (1.5 * u(rng));
    worst = std::max(worst, std::abs(predicted_value(target_probability(x, lo, hi), lo, hi) - x));
  }
  return {worst <= kMappingTol, "max round-trip error " + fmt("%.3e", worst)};
}

Outcome parameter_counting() {
  int configs = 0;
  int mismatches = 0;
  for (int n = 2; n <= 8; ++n) {
    for (int reps = 1; reps <= 4; ++reps) {
      for (int n_h = 1; n_h < n; ++n_h) {
        for (StructureKind st : {StructureKind::Canonical, StructureKind::AlternatingF}) {
          QrnnConfig cfg;
          cfg.n_h = n_h;
          cfg.n_f = n - n_h;
          cfg.ansatz_reps = reps;
          cfg.structure = st;
          const std::size_t formula = 2 * static_cast<std::size_t>(n) * static_cast<std::size_t>(reps + 1);
          const Circuit block = ansatz_for(cfg).bind(std::vector<double>(param_count(cfg), 0.1));
          const std::size_t tally =
              block.count(GateKind::RY) + block.count(GateKind::RZ) + block.count(GateKind::RX);
          ++configs;
          if (param_count(cfg) != formula || tally != formula) ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(configs) + " configs, " + std::to_string(mismatches) + " mismatches"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "qrnn_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "config.json";
  std::ofstream(config) << R"({
  "dataset": {"synthetic_days": 60},
  "training": {"epochs": 2, "shots": 128},
  "enqode": {"steps": 60},
  "depth_scan": {"n_f_max": 3, "fidelity_rows": 80},
  "seeds": [0, 1]
})";
  bool pass = true;
  std::string detail;
  for (const std::string command : {"train", "ablate-preprocessing", "compare-encoding", "depth-scan"}) {
    std::vector<std::string> files;
    for (const char* run : {"a", "b"}) {
      std::ostringstream out;
      std::ostringstream err;
      const int code = cli::run_cli(
          {command, "--config", config.string(), "--out", (root / (command + run)).string(), "--exact"}, out, err);
      if (code != 0) {
        pass = false;
        detail += command + " exited " + std::to_string(code) + ": " + err.str();
      }
    }
    int compared = 0;
    int differing = 0;
    if (fs::exists(root / (command + "a"))) {
      for (const auto& e : fs::directory_iterator(root / (command + "a"))) {
        const std::string name = e.path().filename().string();
        if (name == "timing.json") continue;
        ++compared;
        if (slurp(e.path()) != slurp(root / (command + "b") / name)) ++differing;
      }
    }
    pass = pass && compared > 0 && differing == 0;
    detail += command + " " + std::to_string(compared - differing) + "/" + std::to_string(compared) + " identical; ";
  }
  fs::remove_all(root);
  return {pass, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "exact amplitude encoding", amplitude_encoding},
      {2, "angle encoding tensor product", angle_encoding},
      {3, "canonical and alternating distributions", structure_equivalence},
      {4, "reset: exact engine vs trajectory sampler", reset_correctness},
      {5, "EnQode fidelity", enqode_fidelity},
      {6, "depth scaling", depth_scaling},
      {7, "optimizer correctness", optimizer_correctness},
      {8, "training sanity", training_sanity},
      {9, "MaxMin amplitude ordering", maxmin_ordering},
      {10, "mapping inverses", mapping_inverse},
      {11, "parameter counting", parameter_counting},
      {12, "CLI determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
