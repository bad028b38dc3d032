#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qrnn/data.hpp"
#include "qrnn/optim.hpp"
#include "qrnn/qrnn.hpp"
#include "qrnn/simulator.hpp"

namespace qrnn {

/// (1/M) sum (p_y - p_x)^2. Throws on empty input or a length mismatch.
double mse_loss(std::span<const double> predicted, std::span<const double> target);

struct TrainConfig {
  double learning_rate = 0.03;
  double spsa_step = 0.001;
  int epochs = 50;
  bool exact = true;
  std::uint64_t shots = 1024;
  std::optional<NoiseSpec> noise;
  std::uint64_t seed = 0;
  /// SPSA directions averaged per epoch; each costs two loss evaluations.
  int spsa_directions = 1;
  unsigned threads = 0;

  void validate() const;
};

struct TrainResult {
  std::vector<double> params;
  /// Full-batch loss at the start of each epoch, before its update.
  std::vector<double> curve;
  /// Loss at the returned parameters.
  double final_loss = 0.0;
};

/// Loss over a parameter vector. `evaluation` numbers the calls so that shot
/// sampling can draw fresh, reproducible seeds.
using BatchLoss = std::function<double(std::span<const double> params, std::uint64_t evaluation)>;

/// SPSA + Adam loop shared by the quantum and classical models.
TrainResult optimize(const BatchLoss& loss, std::vector<double> params, const TrainConfig& config);

/// Trains `model` on full batches of `samples`. Feature maps are encoded once
/// up front; circuits for different samples are simulated in parallel.
TrainResult train(const QrnnModel& model, const std::vector<SequenceSample>& samples, const FeatureMap& encoder,
                  const TrainConfig& config);

/// Readout mode for evaluation `evaluation` of sample `sample` under `config`.
ReadoutMode readout_for(const TrainConfig& config, std::uint64_t evaluation, std::size_t sample);

/// Predicted probabilities of a parameter vector on pre-encoded step maps.
std::vector<double> predict_batch(const QrnnConfig& config, std::span<const double> params,
                                  const std::vector<std::vector<Circuit>>& step_maps, const TrainConfig& mode,
                                  std::uint64_t evaluation);

struct EvalResult {
  double mse = 0.0;
  /// mse * (x_max - x_min)^2, the error of the predicted values themselves.
  double return_mse = 0.0;
  std::vector<double> probabilities;
};

/// Test-set error; `mode` supplies exact/shots/noise and the sampling seed.
EvalResult evaluate(const QrnnModel& model, const std::vector<SequenceSample>& samples, const FeatureMap& encoder,
                    const TrainConfig& mode);

/// Elman network h_t = tanh(V x_t + W h_{t-1} + b), p = logistic(U . h_T).
/// Flat parameter layout: U (n_h), V (n_h x n_in, row-major), W (n_h x n_h), b (n_h).
struct ClassicalRnn {
  std::size_t n_h = 3;
  std::size_t n_in = 3;
  std::vector<double> params;
  TargetScale scale;

  static std::size_t param_count(std::size_t n_h, std::size_t n_in) { return n_h * (2 + n_in + n_h); }
  void validate() const;
};

/// Weights uniform in [-0.5, 0.5] from `seed`.
ClassicalRnn make_classical(std::size_t n_h, std::size_t n_in, TargetScale scale, std::uint64_t seed);

double classical_forward(const ClassicalRnn& rnn, std::span<const double> params, const Sequence& sequence);
double classical_forward(const ClassicalRnn& rnn, const Sequence& sequence);

TrainResult classical_train(const ClassicalRnn& rnn, const std::vector<SequenceSample>& samples,
                            const TrainConfig& config);
EvalResult classical_evaluate(const ClassicalRnn& rnn, const std::vector<SequenceSample>& samples);

}  // namespace qrnn
