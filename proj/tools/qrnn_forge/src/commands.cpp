#include "qrnn_forge/commands.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "qrnn/enqode.hpp"
#include "qrnn/parallel.hpp"

namespace qrnn::cli {

namespace {

using json = nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FeatureTable load_table(const DatasetConfig& d, std::size_t min_days = 0) {
  if (d.source == "csv") return compute_features(load_csv(d.path, d.features), d.features);
  SyntheticOptions o;
  o.volatility = d.volatility;
  return compute_features(synthetic(d.synthetic_seed, std::max(d.synthetic_days, min_days), o), d.features);
}

struct Pool {
  unsigned outer = 1;
  unsigned inner = 1;
};

Pool split_pool(std::size_t jobs) {
  const unsigned total = default_thread_count();
  Pool p;
  p.outer = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(total, jobs)));
  p.inner = std::max(1U, total / p.outer);
  return p;
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  double initial_train_mse = 0.0;
  double train_mse = 0.0;
  std::optional<double> test_mse;
  std::optional<double> test_return_mse;
  std::vector<double> curve;
  std::string checkpoint;
};

struct Variant {
  EncodingKind encoding = EncodingKind::AmplitudeExact;
  AmplitudeScaling preprocessing = AmplitudeScaling::None;
  TrainConfig training;
};

struct VariantResult {
  std::size_t parameter_count = 0;
  std::size_t n_features = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<SeedOutcome> seeds;
  std::optional<double> mean_test_mse;
  double mean_train_mse = 0.0;
  std::optional<double> enqode_fidelity;
  std::string enqode_model;
};

EnqodeFitConfig enqode_fit_config(const EnqodeConfig& e, int n_qubits, unsigned threads) {
  EnqodeFitConfig f;
  f.layers = e.layers > 0 ? e.layers : n_qubits;
  f.clusters = e.clusters;
  f.kmeans_iters = e.kmeans_iters;
  f.train.max_steps = e.steps;
  f.train.learning_rate = e.learning_rate;
  f.train.seed = e.seed;
  f.threads = threads;
  return f;
}

FeatureMatrix unit_rows(const FeatureMatrix& rows) {
  FeatureMatrix out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (l2_norm(r) > 0.0) out.push_back(normalize_l2(r));
  }
  return out;
}

VariantResult run_variant(const ExperimentConfig& cfg, const FeatureTable& table, const Variant& v,
                          std::ostream& log) {
  DatasetOptions opts = cfg.dataset.options;
  opts.amplitude_feature = v.preprocessing;
  const PreparedDataset ds = prepare_dataset(table, opts);
  VariantResult res;
  res.n_features = ds.n_features;
  res.n_train = ds.samples.train.size();
  res.n_test = ds.samples.test.size();
  res.seeds.resize(cfg.seeds.size());
  const Pool pool = split_pool(cfg.seeds.size());
  TrainConfig tc = v.training;
  tc.threads = pool.inner;

  if (cfg.model.kind == "classical") {
    res.parameter_count = ClassicalRnn::param_count(static_cast<std::size_t>(cfg.model.n_h), ds.n_features);
    parallel_for(
        cfg.seeds.size(),
        [&](std::size_t i) {
          const std::uint64_t seed = cfg.seeds[i];
          ClassicalRnn rnn = make_classical(static_cast<std::size_t>(cfg.model.n_h), ds.n_features, ds.target_scale, seed);
          TrainConfig local = tc;
          local.seed = seed;
          const TrainResult r = classical_train(rnn, ds.samples.train, local);
          rnn.params = r.params;
          SeedOutcome& o = res.seeds[i];
          o.seed = seed;
          o.curve = r.curve;
          o.initial_train_mse = r.curve.empty() ? r.final_loss : r.curve.front();
          o.train_mse = r.final_loss;
          if (!ds.samples.test.empty()) {
            const EvalResult e = classical_evaluate(rnn, ds.samples.test);
            o.test_mse = e.mse;
            o.test_return_mse = e.return_mse;
          }
          o.checkpoint = json{{"format", "qrnn-forge/classical-checkpoint"},
                              {"schema_version", 1},
                              {"n_h", rnn.n_h},
                              {"n_in", rnn.n_in},
                              {"params", rnn.params},
                              {"scale", {{"min", rnn.scale.min}, {"max", rnn.scale.max}}},
                              {"seed", seed}}
                             .dump(2);
        },
        pool.outer);
  } else {
    QrnnConfig qc;
    qc.n_h = cfg.model.n_h;
    qc.n_f = QrnnConfig::feature_qubits(v.encoding, ds.n_features);
    qc.encoding = v.encoding;
    qc.structure = cfg.model.structure;
    qc.ansatz_reps = cfg.model.ansatz_reps;
    qc.entanglement = cfg.model.entanglement;
    qc.target_feature_index = static_cast<int>(opts.target_index);
    qc.validate();
    res.parameter_count = param_count(qc);

    std::unique_ptr<FeatureMap> encoder;
    if (v.encoding == EncodingKind::Angle) {
      encoder = std::make_unique<AngleFeatureMap>(ds.n_features);
    } else if (v.encoding == EncodingKind::AmplitudeExact) {
      encoder = std::make_unique<AmplitudeFeatureMap>(ds.n_features);
    } else {
      log << "fitting EnQode on " << ds.train_rows.size() << " rows\n";
      auto model = std::make_shared<const EnqodeModel>(
          fit_enqode(unit_rows(ds.train_rows), qc.n_f, enqode_fit_config(cfg.enqode, qc.n_f, default_thread_count())));
      res.enqode_fidelity = mean_fidelity(*model, unit_rows(ds.encoded_rows), cfg.enqode.refine);
      res.enqode_model = enqode_to_json(*model);
      encoder = std::make_unique<EnqodeFeatureMap>(model, ds.n_features, cfg.enqode.refine);
    }

    parallel_for(
        cfg.seeds.size(),
        [&](std::size_t i) {
          const std::uint64_t seed = cfg.seeds[i];
          QrnnModel model = make_model(qc, ds.target_scale, seed);
          TrainConfig local = tc;
          local.seed = seed;
          const TrainResult r = train(model, ds.samples.train, *encoder, local);
          model.params = r.params;
          SeedOutcome& o = res.seeds[i];
          o.seed = seed;
          o.curve = r.curve;
          o.initial_train_mse = r.curve.empty() ? r.final_loss : r.curve.front();
          o.train_mse = r.final_loss;
          if (!ds.samples.test.empty()) {
            const EvalResult e = evaluate(model, ds.samples.test, *encoder, local);
            o.test_mse = e.mse;
            o.test_return_mse = e.return_mse;
          }
          o.checkpoint = model_to_json(model);
        },
        pool.outer);
  }

  double train_sum = 0.0;
  double test_sum = 0.0;
  std::size_t n_test = 0;
  for (const auto& o : res.seeds) {
    train_sum += o.train_mse;
    if (o.test_mse) {
      test_sum += *o.test_mse;
      ++n_test;
    }
  }
  res.mean_train_mse = train_sum / static_cast<double>(res.seeds.size());
  if (n_test > 0) res.mean_test_mse = test_sum / static_cast<double>(n_test);
  return res;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json variant_json(const VariantResult& r) {
  json seeds = json::array();
  for (const auto& o : r.seeds) {
    seeds.push_back({{"seed", o.seed},
                     {"initial_train_mse", o.initial_train_mse},
                     {"train_mse", o.train_mse},
                     {"test_mse", opt(o.test_mse)},
                     {"test_return_mse", opt(o.test_return_mse)}});
  }
  json j{{"parameter_count", r.parameter_count},
         {"n_features", r.n_features},
         {"train_sequences", r.n_train},
         {"test_sequences", r.n_test},
         {"seeds", seeds},
         {"mean", {{"train_mse", r.mean_train_mse}, {"test_mse", opt(r.mean_test_mse)}}}};
  if (r.enqode_fidelity) j["enqode_mean_fidelity"] = *r.enqode_fidelity;
  return j;
}

json summary_header(const ExperimentConfig& cfg, std::string_view command) {
  json config = cfg.resolved;
  config["seeds"] = cfg.seeds;
  return json{{"schema_version", 1}, {"command", command}, {"config", config}};
}

void finish(const OutputDir& out, const json& summary, std::chrono::steady_clock::time_point start) {
  out.write("summary.json", summary.dump(2) + "\n");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.write("timing.json", json{{"wall_time_seconds", wall}}.dump(2) + "\n");
}

std::string curve_csv(const std::vector<double>& curve) {
  std::string s = "epoch,loss\n";
  for (std::size_t e = 0; e < curve.size(); ++e) s += std::to_string(e) + "," + num(curve[e]) + "\n";
  return s;
}

Variant base_variant(const ExperimentConfig& cfg) {
  return Variant{cfg.model.encoding, cfg.preprocessing, cfg.training};
}

void require_amplitude_family(const ExperimentConfig& cfg, std::string_view command) {
  if (cfg.model.kind != "qrnn") {
    throw ConfigError(std::string(command) + " requires model.kind \"qrnn\"");
  }
  if (cfg.model.encoding == EncodingKind::Angle && command == "ablate-preprocessing") {
    throw ConfigError("ablate-preprocessing requires an amplitude-family model.encoding (amplitude or enqode)");
  }
}

}  // namespace

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputDir::write(std::string_view name, std::string_view content) const {
  const std::filesystem::path p(name);
  if (name.empty() || p.has_parent_path() || p.is_absolute() || name == "." || name == "..") {
    throw std::invalid_argument("refusing to write '" + std::string(name) + "' outside the output directory");
  }
  std::ofstream f(root_ / p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + (root_ / p).string() + "'");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed for '" + (root_ / p).string() + "'");
}

void run_train(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const FeatureTable table = load_table(cfg.dataset);
  log << "train: " << cfg.seeds.size() << " seed(s), " << table.rows.size() << " feature rows\n";
  const VariantResult r = run_variant(cfg, table, base_variant(cfg), log);
  for (const auto& o : r.seeds) {
    out.write("curve_seed" + std::to_string(o.seed) + ".csv", curve_csv(o.curve));
    out.write("checkpoint_seed" + std::to_string(o.seed) + ".json", o.checkpoint + "\n");
  }
  if (!r.enqode_model.empty()) out.write("enqode_model.json", r.enqode_model + "\n");
  json summary = summary_header(cfg, "train");
  summary["model"] = cfg.model.kind == "classical" ? "classical" : std::string(to_string(cfg.model.encoding));
  summary.update(variant_json(r));
  finish(out, summary, start);
}

void run_ablate_preprocessing(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& log) {
  require_amplitude_family(cfg, "ablate-preprocessing");
  const auto start = std::chrono::steady_clock::now();
  const FeatureTable table = load_table(cfg.dataset);
  const AmplitudeScaling modes[] = {AmplitudeScaling::None, AmplitudeScaling::MinMax, AmplitudeScaling::MaxMin};
  std::vector<VariantResult> results;
  for (AmplitudeScaling mode : modes) {
    log << "ablate-preprocessing: " << to_string(mode) << "\n";
    Variant v = base_variant(cfg);
    v.preprocessing = mode;
    results.push_back(run_variant(cfg, table, v, log));
  }
  std::string csv = "preprocessing,mean_mse,mse_ratio\n";
  json rows = json::array();
  const std::optional<double> base = results.front().mean_test_mse;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& m = results[i].mean_test_mse;
    const std::optional<double> ratio =
        (m && base && *base > 0.0) ? std::optional<double>(*m / *base) : std::nullopt;
    csv += std::string(to_string(modes[i])) + "," + (m ? num(*m) : "") + "," + (ratio ? num(*ratio) : "") + "\n";
    json row = variant_json(results[i]);
    row["preprocessing"] = to_string(modes[i]);
    row["mse_ratio"] = opt(ratio);
    rows.push_back(row);
  }
  out.write("table.csv", csv);
  json summary = summary_header(cfg, "ablate-preprocessing");
  summary["rows"] = rows;
  finish(out, summary, start);
}

void run_compare_encoding(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& log) {
  require_amplitude_family(cfg, "compare-encoding");
  const auto start = std::chrono::steady_clock::now();
  const FeatureTable table = load_table(cfg.dataset);
  const NoiseSpec noisy = cfg.noise.value_or(NoiseSpec{1e-3, 1e-2});
  struct Row {
    EncodingKind encoding;
    bool noise;
  };
  const Row plan[] = {{EncodingKind::AmplitudeExact, false},
                      {EncodingKind::Enqode, false},
                      {EncodingKind::AmplitudeExact, true},
                      {EncodingKind::Enqode, true}};
  std::vector<VariantResult> results;
  for (const Row& row : plan) {
    log << "compare-encoding: " << to_string(row.encoding) << (row.noise ? " (noisy)" : " (noiseless)") << "\n";
    Variant v = base_variant(cfg);
    v.encoding = row.encoding;
    v.training.noise.reset();
    if (row.noise) {
      v.training.exact = false;
      v.training.noise = noisy;
    }
    results.push_back(run_variant(cfg, table, v, log));
  }
  std::string csv = "feature_map,noise,mse,ratio,mean_fidelity\n";
  json rows = json::array();
  const std::optional<double> base = results.front().mean_test_mse;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& m = results[i].mean_test_mse;
    const std::optional<double> ratio =
        (m && base && *base > 0.0) ? std::optional<double>(*m / *base) : std::nullopt;
    const auto& fid = results[i].enqode_fidelity;
    csv += std::string(to_string(plan[i].encoding)) + "," + (plan[i].noise ? "depolarizing" : "none") + "," +
           (m ? num(*m) : "") + "," + (ratio ? num(*ratio) : "") + "," + (fid ? num(*fid) : "") + "\n";
    json row = variant_json(results[i]);
    row["feature_map"] = to_string(plan[i].encoding);
    row["noise"] = plan[i].noise ? json{{"p1", noisy.p1}, {"p2", noisy.p2}} : json(nullptr);
    row["ratio"] = opt(ratio);
    row["mean_fidelity"] = opt(fid);
    rows.push_back(row);
  }
  out.write("table.csv", csv);
  json summary = summary_header(cfg, "compare-encoding");
  summary["rows"] = rows;
  finish(out, summary, start);
}

void run_depth_scan(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const auto& scan = cfg.depth.scan;
  log << "depth-scan: n_f " << scan.n_f_min << ".." << scan.n_f_max << "\n";
  const std::vector<DepthRow> depth = depth_scan(scan);
  out.write("table.csv", depth_csv(depth));

  const std::size_t widest = std::size_t{1} << scan.n_f_max;
  const FeatureTable table = load_table(cfg.dataset, cfg.depth.fidelity_rows + widest + 1);
  const FeatureMatrix scaled = apply_scaler(fit_scaler(table.rows), table.rows);
  const FeatureMatrix augmented = augment_amplitude_feature(scaled, cfg.preprocessing);
  std::string csv = "qubits,features,layers,mean_fidelity\n";
  json fid_rows = json::array();
  for (int n = scan.n_f_min; n <= scan.n_f_max; ++n) {
    const std::size_t width = std::size_t{1} << n;
    FeatureMatrix rows = unit_rows(stack_lags(augmented, width));
    if (rows.size() > cfg.depth.fidelity_rows) rows.resize(cfg.depth.fidelity_rows);
    const EnqodeFitConfig fit = enqode_fit_config(cfg.enqode, n, default_thread_count());
    log << "depth-scan: EnQode fit on " << rows.size() << " rows, " << n << " qubits, " << fit.layers << " layers\n";
    const EnqodeModel model = fit_enqode(rows, n, fit);
    const double f = mean_fidelity(model, rows, cfg.enqode.refine);
    csv += std::to_string(n) + "," + std::to_string(width) + "," + std::to_string(fit.layers) + "," + num(f) + "\n";
    fid_rows.push_back({{"qubits", n}, {"features", width}, {"layers", fit.layers}, {"rows", rows.size()},
                        {"mean_fidelity", f}});
  }
  out.write("enqode_fidelity.csv", csv);

  json depth_rows = json::array();
  for (const auto& r : depth) {
    depth_rows.push_back({{"n_f", r.n_f},
                          {"features", r.features},
                          {"encoding", to_string(r.encoding)},
                          {"structure", to_string(r.structure)},
                          {"depth", r.depth},
                          {"two_qubit_depth", r.two_qubit_depth}});
  }
  json summary = summary_header(cfg, "depth-scan");
  summary["depth"] = depth_rows;
  summary["enqode_fidelity"] = fid_rows;
  finish(out, summary, start);
}

}  // namespace qrnn::cli
