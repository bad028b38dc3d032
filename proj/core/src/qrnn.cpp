#include "qrnn/qrnn.hpp"

#include <nlohmann/json.hpp>

#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "qrnn/log.hpp"
#include "qrnn/mapping.hpp"
#include "qrnn/random.hpp"

namespace qrnn {

std::string_view to_string(EncodingKind kind) {
  switch (kind) {
    case EncodingKind::Angle: return "angle";
    case EncodingKind::AmplitudeExact: return "amplitude";
    case EncodingKind::Enqode: return "enqode";
  }
  return "?";
}

std::string_view to_string(StructureKind kind) {
  return kind == StructureKind::Canonical ? "canonical" : "alternating";
}

std::string_view to_string(Entanglement kind) {
  return kind == Entanglement::Linear ? "linear" : "full";
}

EncodingKind parse_encoding(std::string_view name) {
  if (name == "angle") return EncodingKind::Angle;
  if (name == "amplitude" || name == "amplitude_exact") return EncodingKind::AmplitudeExact;
  if (name == "enqode") return EncodingKind::Enqode;
  throw std::invalid_argument("unknown encoding '" + std::string(name) + "'");
}

StructureKind parse_structure(std::string_view name) {
  if (name == "canonical") return StructureKind::Canonical;
  if (name == "alternating" || name == "alternating_f") return StructureKind::AlternatingF;
  throw std::invalid_argument("unknown structure '" + std::string(name) + "'");
}

Entanglement parse_entanglement(std::string_view name) {
  if (name == "linear") return Entanglement::Linear;
  if (name == "full") return Entanglement::Full;
  throw std::invalid_argument("unknown entanglement '" + std::string(name) + "'");
}

int QrnnConfig::feature_qubits(EncodingKind encoding, std::size_t n_features) {
  if (encoding == EncodingKind::Angle) return static_cast<int>(n_features);
  return amplitude_qubits(n_features);
}

void QrnnConfig::validate() const {
  if (n_h < 1) throw std::invalid_argument("qrnn config: n_h must be at least 1");
  if (n_f < 1) throw std::invalid_argument("qrnn config: n_f must be at least 1");
  if (ansatz_reps < 1) throw std::invalid_argument("qrnn config: ansatz_reps must be at least 1");
  const long long outcomes = encoding == EncodingKind::Angle ? n_f : (1LL << n_f);
  if (target_feature_index < 0 || target_feature_index >= outcomes) {
    throw std::invalid_argument("qrnn config: target feature index " +
                                std::to_string(target_feature_index) + " out of range for " +
                                std::string(to_string(encoding)) + " readout on " +
                                std::to_string(n_f) + " feature qubits");
  }
}

int QrnnConfig::width() const {
  return n_h + (structure == StructureKind::AlternatingF ? 2 * n_f : n_f);
}

std::vector<int> QrnnConfig::hidden_qubits() const {
  std::vector<int> q(static_cast<std::size_t>(n_h));
  std::iota(q.begin(), q.end(), 0);
  return q;
}

std::vector<int> QrnnConfig::feature_register(int which) const {
  std::vector<int> q(static_cast<std::size_t>(n_f));
  std::iota(q.begin(), q.end(), n_h + which * n_f);
  return q;
}

std::size_t param_count(const QrnnConfig& config) {
  return 2 * static_cast<std::size_t>(config.n_h + config.n_f) *
         static_cast<std::size_t>(config.ansatz_reps + 1);
}

AnsatzTemplate ansatz_for(const QrnnConfig& config) {
  return build_ansatz(config.n_h + config.n_f, config.ansatz_reps, config.entanglement);
}

void QrnnModel::validate() const {
  config.validate();
  if (params.size() != param_count(config)) {
    throw std::invalid_argument("qrnn model: expected " + std::to_string(param_count(config)) +
                                " parameters, got " + std::to_string(params.size()));
  }
}

QrnnModel make_model(const QrnnConfig& config, TargetScale scale, std::uint64_t seed) {
  config.validate();
  QrnnModel model{config, std::vector<double>(param_count(config)), scale, seed};
  Rng rng(derive_seed(seed, {0x51A7}));
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (double& p : model.params) p = angle(rng);
  return model;
}

AngleFeatureMap::AngleFeatureMap(std::size_t n_features) : n_features_(n_features) {
  if (n_features == 0) throw std::invalid_argument("angle feature map needs at least one feature");
}

Circuit AngleFeatureMap::encode(std::span<const double> features) const {
  if (features.size() != n_features_) throw std::invalid_argument("angle feature map: feature count mismatch");
  return angle_feature_map(features);
}

FeatureRow amplitude_target(std::span<const double> features) {
  FeatureRow x(features.begin(), features.end());
  bool clipped = false;
  for (double& v : x) {
    if (v < 0.0) {
      v = 0.0;
      clipped = true;
    }
  }
  if (clipped) warn("amplitude encoding: negative scaled feature clipped to 0 (value below the training range)");
  if (l2_norm(x) == 0.0) {
    warn("amplitude encoding: all-zero feature row encoded as the first basis state");
    x.assign(x.size(), 0.0);
    x[0] = 1.0;
    return x;
  }
  return normalize_l2(x);
}

AmplitudeFeatureMap::AmplitudeFeatureMap(std::size_t n_features) : n_features_(n_features) {
  if (n_features == 0) throw std::invalid_argument("amplitude feature map needs at least one feature");
}

Circuit AmplitudeFeatureMap::encode(std::span<const double> features) const {
  if (features.size() != n_features_) {
    throw std::invalid_argument("amplitude feature map: feature count mismatch");
  }
  return amplitude_qsp(amplitude_target(features));
}

EnqodeFeatureMap::EnqodeFeatureMap(std::shared_ptr<const EnqodeModel> model, std::size_t n_features,
                                   bool refine)
    : model_(std::move(model)), n_features_(n_features), refine_(refine) {
  if (!model_) throw std::invalid_argument("enqode feature map needs a fitted model");
  if (n_features_ == 0 || n_features_ > model_->dimension()) {
    throw std::invalid_argument("enqode feature map: feature count does not fit the model");
  }
}

Circuit EnqodeFeatureMap::encode(std::span<const double> features) const {
  if (features.size() != n_features_) throw std::invalid_argument("enqode feature map: feature count mismatch");
  return encode_sample(*model_, amplitude_target(features), refine_).circuit;
}

std::vector<Circuit> encode_sequence(const QrnnConfig& config, const Sequence& sequence,
                                     const FeatureMap& encoder) {
  if (sequence.empty()) throw std::invalid_argument("qrnn: sequence must have at least one step");
  if (encoder.kind() != config.encoding) {
    throw std::invalid_argument("qrnn: encoder kind " + std::string(to_string(encoder.kind())) +
                                " does not match configured " + std::string(to_string(config.encoding)));
  }
  if (encoder.n_qubits() != config.n_f) {
    throw std::invalid_argument("qrnn: encoder uses " + std::to_string(encoder.n_qubits()) +
                                " qubits but n_f is " + std::to_string(config.n_f));
  }
  std::vector<Circuit> maps;
  maps.reserve(sequence.size());
  for (const auto& step : sequence) {
    if (step.size() != encoder.n_features()) {
      throw std::invalid_argument("qrnn: step has " + std::to_string(step.size()) +
                                  " features, encoder expects " + std::to_string(encoder.n_features()));
    }
    maps.push_back(encoder.encode(step));
  }
  return maps;
}

namespace {

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void check_maps(const QrnnConfig& config, std::span<const Circuit> step_maps) {
  config.validate();
  if (step_maps.empty()) throw std::invalid_argument("qrnn: sequence must have at least one step");
  for (const auto& m : step_maps) {
    if (m.n_qubits() != config.n_f) throw std::invalid_argument("qrnn: feature map width differs from n_f");
    if (m.has_reset()) throw std::invalid_argument("qrnn: feature maps must be reset-free");
  }
}

}  // namespace

Circuit build_canonical(const QrnnConfig& config, std::span<const double> params,
                        std::span<const Circuit> step_maps) {
  check_maps(config, step_maps);
  const AnsatzTemplate ansatz = ansatz_for(config);
  const std::vector<int> f = config.feature_register(0);
  const std::vector<int> block = concat(config.hidden_qubits(), f);
  Circuit c(config.n_h + config.n_f);
  for (std::size_t t = 0; t < step_maps.size(); ++t) {
    c.append(step_maps[t], f);
    ansatz.append_to(c, block, params);
    if (t + 1 < step_maps.size()) {
      for (int q : f) c.reset(q);
    }
  }
  c.set_measured_qubits(f);
  return c;
}

Circuit build_alternating(const QrnnConfig& config, std::span<const double> params,
                          std::span<const Circuit> step_maps) {
  check_maps(config, step_maps);
  const AnsatzTemplate ansatz = ansatz_for(config);
  const std::vector<int> hidden = config.hidden_qubits();
  const std::vector<int> regs[2] = {config.feature_register(0), config.feature_register(1)};
  Circuit c(config.n_h + 2 * config.n_f);
  const std::size_t steps = step_maps.size();
  c.append(step_maps[0], regs[0]);
  for (std::size_t t = 0; t < steps; ++t) {
    const auto& active = regs[t % 2];
    const auto& idle = regs[(t + 1) % 2];
    // The idle register was reset after step t - 1, so the next input can be
    // prepared on it concurrently with this step's ansatz.
    if (t + 1 < steps) c.append(step_maps[t + 1], idle);
    ansatz.append_to(c, concat(hidden, active), params);
    if (t + 1 < steps) {
      for (int q : active) c.reset(q);
    }
  }
  c.set_measured_qubits(regs[(steps - 1) % 2]);
  return c;
}

Circuit build_circuit(const QrnnConfig& config, std::span<const double> params,
                      std::span<const Circuit> step_maps) {
  return config.structure == StructureKind::Canonical ? build_canonical(config, params, step_maps)
                                                      : build_alternating(config, params, step_maps);
}

Circuit build_canonical(const QrnnModel& model, const Sequence& sequence, const FeatureMap& encoder) {
  model.validate();
  const auto maps = encode_sequence(model.config, sequence, encoder);
  return build_canonical(model.config, model.params, maps);
}

Circuit build_alternating(const QrnnModel& model, const Sequence& sequence, const FeatureMap& encoder) {
  model.validate();
  const auto maps = encode_sequence(model.config, sequence, encoder);
  return build_alternating(model.config, model.params, maps);
}

double readout_probability(const QrnnConfig& config, const Circuit& circuit, const ReadoutMode& mode) {
  config.validate();
  std::vector<double> probs;
  if (mode.exact) {
    if (mode.noise && !mode.noise->is_noiseless()) {
      throw std::invalid_argument("noisy readout requires shot sampling");
    }
    probs = run_exact(circuit).probs;
  } else {
    probs = frequencies(sample(circuit, mode.shots, mode.seed, mode.noise),
                        circuit.measured_qubits().size());
  }
  const auto i = static_cast<std::size_t>(config.target_feature_index);
  if (config.encoding == EncodingKind::Angle) {
    double p = 0.0;
    for (std::size_t o = 0; o < probs.size(); ++o) {
      if ((o >> i) & 1U) p += probs[o];
    }
    return p;
  }
  return probs.at(i);
}

Prediction predict(const QrnnModel& model, const Sequence& sequence, const FeatureMap& encoder,
                   const ReadoutMode& mode) {
  model.validate();
  const auto maps = encode_sequence(model.config, sequence, encoder);
  const Circuit circuit = build_circuit(model.config, model.params, maps);
  Prediction out;
  out.probability = readout_probability(model.config, circuit, mode);
  out.value = predicted_value(out.probability, model.scale.min, model.scale.max);
  return out;
}

std::string model_to_json(const QrnnModel& model) {
  nlohmann::json j;
  j["format"] = "qrnn-forge/checkpoint";
  j["schema_version"] = 1;
  j["config"] = {
      {"n_h", model.config.n_h},
      {"n_f", model.config.n_f},
      {"encoding", to_string(model.config.encoding)},
      {"structure", to_string(model.config.structure)},
      {"ansatz_reps", model.config.ansatz_reps},
      {"entanglement", to_string(model.config.entanglement)},
      {"target_feature_index", model.config.target_feature_index},
  };
  j["params"] = model.params;
  j["scale"] = {{"min", model.scale.min}, {"max", model.scale.max}};
  j["seed"] = model.seed;
  return j.dump(2);
}

QrnnModel model_from_json(std::string_view text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto& c = j.at("config");
  QrnnModel model;
  model.config.n_h = c.at("n_h").get<int>();
  model.config.n_f = c.at("n_f").get<int>();
  model.config.encoding = parse_encoding(c.at("encoding").get<std::string>());
  model.config.structure = parse_structure(c.at("structure").get<std::string>());
  model.config.ansatz_reps = c.at("ansatz_reps").get<int>();
  model.config.entanglement = parse_entanglement(c.at("entanglement").get<std::string>());
  model.config.target_feature_index = c.at("target_feature_index").get<int>();
  model.params = j.at("params").get<std::vector<double>>();
  model.scale = TargetScale{j.at("scale").at("min").get<double>(), j.at("scale").at("max").get<double>()};
  model.seed = j.at("seed").get<std::uint64_t>();
  model.validate();
  return model;
}

}  // namespace qrnn
