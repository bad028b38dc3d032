#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrnn/data.hpp"
#include "qrnn/depth.hpp"
#include "qrnn/qrnn.hpp"
#include "qrnn/training.hpp"

namespace qrnn::cli {

/// Invalid configuration; reported with exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetConfig {
  std::string source = "synthetic";  // "synthetic" or "csv"
  std::filesystem::path path;        // resolved against the config file's directory
  FeatureSpec features = FeatureSpec::Yahoo3;
  std::uint64_t synthetic_seed = 2017;
  std::size_t synthetic_days = 252;
  double volatility = 0.01;
  DatasetOptions options;
};

struct ModelConfig {
  std::string kind = "qrnn";  // "qrnn" or "classical"
  int n_h = 3;
  EncodingKind encoding = EncodingKind::AmplitudeExact;
  StructureKind structure = StructureKind::Canonical;
  int ansatz_reps = 1;
  Entanglement entanglement = Entanglement::Full;
};

struct EnqodeConfig {
  int layers = 0;  // 0: one layer per qubit
  std::size_t clusters = 0;
  bool refine = true;
  int kmeans_iters = 100;
  int steps = 500;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
};

struct DepthConfig {
  DepthScanConfig scan;
  std::size_t fidelity_rows = 500;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  AmplitudeScaling preprocessing = AmplitudeScaling::None;
  ModelConfig model;
  TrainConfig training;
  std::optional<NoiseSpec> noise;
  EnqodeConfig enqode;
  DepthConfig depth;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  /// The merged document the fields were read from.
  nlohmann::json resolved;
};

/// The complete default document; every accepted key appears in it.
nlohmann::json default_config();

/// Applies a dotted override "a.b.c=value"; the value is parsed as JSON and
/// falls back to a plain string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Merges `user` over the defaults, rejects unknown keys and ill-typed
/// values, and checks referenced files. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& user, const std::filesystem::path& base_dir);

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);

std::string_view to_string(AmplitudeScaling mode);
AmplitudeScaling parse_amplitude_scaling(std::string_view name);

}  // namespace qrnn::cli
