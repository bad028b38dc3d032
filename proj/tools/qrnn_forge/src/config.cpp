#include "qrnn_forge/config.hpp"

#include <fstream>
#include <sstream>

namespace qrnn::cli {

namespace {

using json = nlohmann::json;

void check_keys(const json& user, const json& defaults, const std::string& prefix) {
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    const json& def = defaults.at(key);
    if (def.is_object() && !value.is_null()) {
      if (!value.is_object()) throw ConfigError("config key '" + path + "' must be an object");
      check_keys(value, def, path);
    }
  }
}

// Typed accessor that names the offending key on failure.
class Reader {
 public:
  Reader(const json& doc, std::string prefix) : doc_(doc), prefix_(std::move(prefix)) {}

  Reader sub(const std::string& key) const { return Reader(doc_.at(key), name(key)); }
  bool is_null(const std::string& key) const { return !doc_.contains(key) || doc_.at(key).is_null(); }

  std::string str(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_string()) fail(key, "a string");
    return v.get<std::string>();
  }
  double number(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_number()) fail(key, "a number");
    return v.get<double>();
  }
  long long integer(const std::string& key, long long lo) const {
    const json& v = doc_.at(key);
    if (!v.is_number_integer()) fail(key, "an integer");
    const auto x = v.get<long long>();
    if (x < lo) fail(key, "an integer >= " + std::to_string(lo));
    return x;
  }
  bool boolean(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_boolean()) fail(key, "a boolean");
    return v.get<bool>();
  }
  template <class F>
  auto parsed(const std::string& key, F&& parse) const {
    try {
      return parse(str(key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config key '" + name(key) + "': " + e.what());
    }
  }
  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("config key '" + name(key) + "' must be " + what);
  }

 private:
  const json& doc_;
  std::string prefix_;
};

}  // namespace

std::string_view to_string(AmplitudeScaling mode) {
  switch (mode) {
    case AmplitudeScaling::None: return "none";
    case AmplitudeScaling::MinMax: return "minmax";
    case AmplitudeScaling::MaxMin: return "maxmin";
  }
  return "?";
}

AmplitudeScaling parse_amplitude_scaling(std::string_view name) {
  if (name == "none") return AmplitudeScaling::None;
  if (name == "minmax") return AmplitudeScaling::MinMax;
  if (name == "maxmin") return AmplitudeScaling::MaxMin;
  throw std::invalid_argument("unknown preprocessing mode '" + std::string(name) + "'");
}

json default_config() {
  return json{
      {"dataset",
       {{"source", "synthetic"},
        {"path", nullptr},
        {"features", "yahoo3"},
        {"synthetic_seed", 2017},
        {"synthetic_days", 252},
        {"volatility", 0.01},
        {"sequence_length", 8},
        {"test_ratio", 0.2},
        {"target_index", 0},
        {"embargo", 0}}},
      {"preprocessing", "none"},
      {"model",
       {{"kind", "qrnn"},
        {"n_h", 3},
        {"encoding", "amplitude"},
        {"structure", "canonical"},
        {"ansatz_reps", 1},
        {"entanglement", "full"}}},
      {"training",
       {{"epochs", 50},
        {"learning_rate", 0.03},
        {"spsa_step", 0.001},
        {"exact", true},
        {"shots", 1024},
        {"spsa_directions", 1}}},
      {"noise", {{"p1", 0.0}, {"p2", 0.0}}},
      {"enqode",
       {{"layers", 0},
        {"clusters", 0},
        {"refine", true},
        {"kmeans_iters", 100},
        {"steps", 500},
        {"learning_rate", 0.05},
        {"seed", 0}}},
      {"depth_scan",
       {{"n_f_min", 2},
        {"n_f_max", 5},
        {"sequence_length", 3},
        {"n_h", 3},
        {"ansatz_reps", 1},
        {"entanglement", "linear"},
        {"coupling", "all_to_all"},
        {"seed", 7},
        {"fidelity_rows", 500}}},
      {"seeds", {0, 1, 2, 3, 4}},
  };
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

ExperimentConfig parse_config(const json& user, const std::filesystem::path& base_dir) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  const json defaults = default_config();
  check_keys(user, defaults, "");
  json merged = defaults;
  for (const auto& [key, value] : user.items()) {
    if (value.is_object() && merged[key].is_object()) {
      for (const auto& [k, v] : value.items()) merged[key][k] = v;
    } else {
      merged[key] = value;
    }
  }

  ExperimentConfig cfg;
  const Reader root(merged, "");

  const Reader ds = root.sub("dataset");
  cfg.dataset.source = ds.str("source");
  if (cfg.dataset.source != "synthetic" && cfg.dataset.source != "csv") {
    throw ConfigError("config key 'dataset.source' must be \"synthetic\" or \"csv\"");
  }
  cfg.dataset.features = ds.parsed("features", parse_feature_spec);
  cfg.dataset.synthetic_seed = static_cast<std::uint64_t>(ds.integer("synthetic_seed", 0));
  cfg.dataset.synthetic_days = static_cast<std::size_t>(ds.integer("synthetic_days", 2));
  cfg.dataset.volatility = ds.number("volatility");
  if (cfg.dataset.volatility < 0.0) ds.fail("volatility", "non-negative");
  cfg.dataset.options.sequence_length = static_cast<std::size_t>(ds.integer("sequence_length", 1));
  cfg.dataset.options.test_ratio = ds.number("test_ratio");
  if (!(cfg.dataset.options.test_ratio >= 0.0 && cfg.dataset.options.test_ratio < 1.0)) {
    ds.fail("test_ratio", "in [0, 1)");
  }
  cfg.dataset.options.target_index = static_cast<std::size_t>(ds.integer("target_index", 0));
  if (cfg.dataset.options.target_index >= feature_names(cfg.dataset.features).size()) {
    ds.fail("target_index", "below the feature count of " + std::string(to_string(cfg.dataset.features)));
  }
  cfg.dataset.options.embargo = static_cast<std::size_t>(ds.integer("embargo", 0));
  if (cfg.dataset.source == "csv") {
    if (ds.is_null("path")) throw ConfigError("config key 'dataset.path' is required when dataset.source is \"csv\"");
    std::filesystem::path p = ds.str("path");
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::is_regular_file(p)) {
      throw ConfigError("data file '" + p.string() + "' does not exist");
    }
    cfg.dataset.path = p;
  }

  cfg.preprocessing = root.parsed("preprocessing", parse_amplitude_scaling);
  cfg.dataset.options.amplitude_feature = cfg.preprocessing;

  const Reader model = root.sub("model");
  cfg.model.kind = model.str("kind");
  if (cfg.model.kind != "qrnn" && cfg.model.kind != "classical") {
    throw ConfigError("config key 'model.kind' must be \"qrnn\" or \"classical\"");
  }
  cfg.model.n_h = static_cast<int>(model.integer("n_h", 1));
  cfg.model.encoding = model.parsed("encoding", parse_encoding);
  cfg.model.structure = model.parsed("structure", parse_structure);
  cfg.model.ansatz_reps = static_cast<int>(model.integer("ansatz_reps", 1));
  cfg.model.entanglement = model.parsed("entanglement", parse_entanglement);

  const Reader tr = root.sub("training");
  cfg.training.epochs = static_cast<int>(tr.integer("epochs", 0));
  cfg.training.learning_rate = tr.number("learning_rate");
  if (!(cfg.training.learning_rate > 0.0)) tr.fail("learning_rate", "positive");
  cfg.training.spsa_step = tr.number("spsa_step");
  if (!(cfg.training.spsa_step > 0.0)) tr.fail("spsa_step", "positive");
  cfg.training.exact = tr.boolean("exact");
  cfg.training.shots = static_cast<std::uint64_t>(tr.integer("shots", 1));
  cfg.training.spsa_directions = static_cast<int>(tr.integer("spsa_directions", 1));

  if (!root.is_null("noise")) {
    const Reader nz = root.sub("noise");
    NoiseSpec spec{nz.number("p1"), nz.number("p2")};
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'noise': ") + e.what());
    }
    if (!spec.is_noiseless()) cfg.noise = spec;
  }

  const Reader eq = root.sub("enqode");
  cfg.enqode.layers = static_cast<int>(eq.integer("layers", 0));
  cfg.enqode.clusters = static_cast<std::size_t>(eq.integer("clusters", 0));
  cfg.enqode.refine = eq.boolean("refine");
  cfg.enqode.kmeans_iters = static_cast<int>(eq.integer("kmeans_iters", 1));
  cfg.enqode.steps = static_cast<int>(eq.integer("steps", 0));
  cfg.enqode.learning_rate = eq.number("learning_rate");
  if (!(cfg.enqode.learning_rate > 0.0)) eq.fail("learning_rate", "positive");
  cfg.enqode.seed = static_cast<std::uint64_t>(eq.integer("seed", 0));

  const Reader dp = root.sub("depth_scan");
  auto& scan = cfg.depth.scan;
  scan.n_f_min = static_cast<int>(dp.integer("n_f_min", 1));
  scan.n_f_max = static_cast<int>(dp.integer("n_f_max", 1));
  if (scan.n_f_max < scan.n_f_min) dp.fail("n_f_max", "at least depth_scan.n_f_min");
  if (scan.n_f_max > 10) dp.fail("n_f_max", "at most 10");
  scan.sequence_length = static_cast<int>(dp.integer("sequence_length", 1));
  scan.n_h = static_cast<int>(dp.integer("n_h", 1));
  scan.ansatz_reps = static_cast<int>(dp.integer("ansatz_reps", 1));
  scan.entanglement = dp.parsed("entanglement", parse_entanglement);
  scan.coupling = dp.parsed("coupling", parse_coupling);
  scan.seed = static_cast<std::uint64_t>(dp.integer("seed", 0));
  cfg.depth.fidelity_rows = static_cast<std::size_t>(dp.integer("fidelity_rows", 1));

  const json& seeds = merged.at("seeds");
  if (!seeds.is_array() || seeds.empty()) throw ConfigError("config key 'seeds' must be a non-empty array");
  cfg.seeds.clear();
  for (const auto& s : seeds) {
    if (!s.is_number_integer() || s.get<long long>() < 0) {
      throw ConfigError("config key 'seeds' must hold non-negative integers");
    }
    cfg.seeds.push_back(s.get<std::uint64_t>());
  }

  try {
    cfg.training.noise = cfg.noise;
    cfg.training.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.resolved = std::move(merged);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file '" + path.string() + "' is not valid JSON");
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc, path.parent_path());
}

}  // namespace qrnn::cli
