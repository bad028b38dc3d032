#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrnn/ansatz.hpp"
#include "qrnn/circuit.hpp"
#include "qrnn/encoding.hpp"
#include "qrnn/enqode.hpp"
#include "qrnn/simulator.hpp"

namespace qrnn {

enum class EncodingKind { Angle, AmplitudeExact, Enqode };
enum class StructureKind { Canonical, AlternatingF };

std::string_view to_string(EncodingKind kind);
std::string_view to_string(StructureKind kind);
std::string_view to_string(Entanglement kind);
EncodingKind parse_encoding(std::string_view name);
StructureKind parse_structure(std::string_view name);
Entanglement parse_entanglement(std::string_view name);

/// Register sizes and ansatz shape. Qubits [0, n_h) form the hidden register,
/// [n_h, n_h + n_f) the first feature register and, for the alternating
/// layout, [n_h + n_f, n_h + 2 n_f) the second.
struct QrnnConfig {
  int n_h = 3;
  int n_f = 2;
  EncodingKind encoding = EncodingKind::AmplitudeExact;
  StructureKind structure = StructureKind::Canonical;
  int ansatz_reps = 1;
  Entanglement entanglement = Entanglement::Full;
  int target_feature_index = 0;

  /// Feature-register width implied by a feature count for `encoding`.
  static int feature_qubits(EncodingKind encoding, std::size_t n_features);
  void validate() const;
  int width() const;
  std::vector<int> hidden_qubits() const;
  std::vector<int> feature_register(int which) const;  // which = 0 (F_a) or 1 (F_b)
};

/// 2 (n_h + n_f)(reps + 1), for both structures.
std::size_t param_count(const QrnnConfig& config);
AnsatzTemplate ansatz_for(const QrnnConfig& config);

/// Bounds of the predicted feature used by the probability <-> value mapping.
struct TargetScale {
  double min = 0.0;
  double max = 1.0;
};

struct QrnnModel {
  QrnnConfig config;
  std::vector<double> params;
  TargetScale scale;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Uniform(-pi, pi) parameters drawn from `seed`.
QrnnModel make_model(const QrnnConfig& config, TargetScale scale, std::uint64_t seed);

/// Circuit fragment preparing one time step's feature state on n_qubits() qubits.
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;
  virtual EncodingKind kind() const = 0;
  virtual int n_qubits() const = 0;
  virtual std::size_t n_features() const = 0;
  virtual Circuit encode(std::span<const double> features) const = 0;
};

class AngleFeatureMap final : public FeatureMap {
 public:
  explicit AngleFeatureMap(std::size_t n_features);
  EncodingKind kind() const override { return EncodingKind::Angle; }
  int n_qubits() const override { return static_cast<int>(n_features_); }
  std::size_t n_features() const override { return n_features_; }
  Circuit encode(std::span<const double> features) const override;

 private:
  std::size_t n_features_;
};

/// Amplitude-encoding target of a scaled row: negative components (test
/// values below the training range) are clipped to 0 with a warning, then the
/// row is l2-normalized. An all-zero row maps to the first basis state.
FeatureRow amplitude_target(std::span<const double> features);

/// Prepares amplitude_target(row), zero-padded, exactly.
class AmplitudeFeatureMap final : public FeatureMap {
 public:
  explicit AmplitudeFeatureMap(std::size_t n_features);
  EncodingKind kind() const override { return EncodingKind::AmplitudeExact; }
  int n_qubits() const override { return amplitude_qubits(n_features_); }
  std::size_t n_features() const override { return n_features_; }
  Circuit encode(std::span<const double> features) const override;

 private:
  std::size_t n_features_;
};

/// Uses the nearest EnQode centroid's ansatz for amplitude_target(row).
class EnqodeFeatureMap final : public FeatureMap {
 public:
  EnqodeFeatureMap(std::shared_ptr<const EnqodeModel> model, std::size_t n_features, bool refine);
  EncodingKind kind() const override { return EncodingKind::Enqode; }
  int n_qubits() const override { return model_->ansatz.n_qubits; }
  std::size_t n_features() const override { return n_features_; }
  Circuit encode(std::span<const double> features) const override;
  const EnqodeModel& model() const { return *model_; }

 private:
  std::shared_ptr<const EnqodeModel> model_;
  std::size_t n_features_;
  bool refine_;
};

using Sequence = std::vector<FeatureRow>;

/// Encodes each time step of a sequence; checks the encoder against `config`.
std::vector<Circuit> encode_sequence(const QrnnConfig& config, const Sequence& sequence,
                                     const FeatureMap& encoder);

/// Canonical layout: per step, feature map on F, shared ansatz on H u F, then
/// RESET of F except after the last step. Measures F.
Circuit build_canonical(const QrnnConfig& config, std::span<const double> params,
                        std::span<const Circuit> step_maps);
Circuit build_canonical(const QrnnModel& model, const Sequence& sequence, const FeatureMap& encoder);

/// Alternating layout: odd steps use F_a, even steps F_b. The next step's
/// feature map is prepared on the idle register while the ansatz runs on
/// H u (active register); a register is reset right after its ansatz block.
/// Measures the register active at the last step.
Circuit build_alternating(const QrnnConfig& config, std::span<const double> params,
                          std::span<const Circuit> step_maps);
Circuit build_alternating(const QrnnModel& model, const Sequence& sequence, const FeatureMap& encoder);

/// Dispatches on config.structure.
Circuit build_circuit(const QrnnConfig& config, std::span<const double> params,
                      std::span<const Circuit> step_maps);

/// How measurement probabilities are obtained.
struct ReadoutMode {
  bool exact = true;
  std::uint64_t shots = 1024;
  std::uint64_t seed = 0;
  std::optional<NoiseSpec> noise;

  static ReadoutMode exact_mode() { return {}; }
  static ReadoutMode shots_mode(std::uint64_t shots, std::uint64_t seed,
                                std::optional<NoiseSpec> noise = std::nullopt) {
    return {false, shots, seed, noise};
  }
};

/// Probability read off a built circuit: angle encoding uses the |1> marginal
/// of F qubit i, amplitude encodings the joint F outcome |i>.
double readout_probability(const QrnnConfig& config, const Circuit& circuit, const ReadoutMode& mode);

struct Prediction {
  double probability = 0.0;
  double value = 0.0;
};

Prediction predict(const QrnnModel& model, const Sequence& sequence, const FeatureMap& encoder,
                   const ReadoutMode& mode = ReadoutMode::exact_mode());

/// Checkpoint JSON {format, schema_version, config, params, scale, seed}.
std::string model_to_json(const QrnnModel& model);
QrnnModel model_from_json(std::string_view text);

}  // namespace qrnn
