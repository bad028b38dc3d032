#include "qrnn/training.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qrnn/parallel.hpp"

namespace qrnn {

double mse_loss(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.empty()) throw std::invalid_argument("mse_loss: empty input");
  if (predicted.size() != target.size()) {
    throw std::invalid_argument("mse_loss: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                                std::to_string(target.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < predicted.size(); ++m) {
    const double d = predicted[m] - target[m];
    sum += d * d;
  }
  return sum / static_cast<double>(predicted.size());
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("train config: learning_rate must be positive");
  if (!(spsa_step > 0.0)) throw std::invalid_argument("train config: spsa_step must be positive");
  if (epochs < 0) throw std::invalid_argument("train config: epochs must be non-negative");
  if (spsa_directions < 1) throw std::invalid_argument("train config: spsa_directions must be at least 1");
  if (!exact && shots == 0) throw std::invalid_argument("train config: shots must be at least 1");
  if (noise) noise->validate();
  if (exact && noise && !noise->is_noiseless()) {
    throw std::invalid_argument("train config: noise requires shot sampling");
  }
}

TrainResult optimize(const BatchLoss& loss, std::vector<double> params, const TrainConfig& config) {
  config.validate();
  TrainResult result;
  AdamState adam(params.size());
  Rng rng(derive_seed(config.seed, {0x5B5A}));
  const auto per_epoch = static_cast<std::uint64_t>(config.spsa_directions) + 1;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::uint64_t base = static_cast<std::uint64_t>(epoch) * per_epoch;
    result.curve.push_back(loss(params, base));
    std::vector<double> grad(params.size(), 0.0);
    for (int d = 0; d < config.spsa_directions; ++d) {
      // Both SPSA points share one sampling seed so shot noise cancels in the difference.
      const std::uint64_t evaluation = base + 1 + static_cast<std::uint64_t>(d);
      const LossFn at = [&](std::span<const double> p) { return loss(p, evaluation); };
      const auto g = spsa_gradient(at, params, config.spsa_step, rng);
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i] / config.spsa_directions;
    }
    adam_step(adam, grad, params, config.learning_rate);
  }
  result.final_loss = loss(params, static_cast<std::uint64_t>(config.epochs) * per_epoch);
  result.params = std::move(params);
  return result;
}

ReadoutMode readout_for(const TrainConfig& config, std::uint64_t evaluation, std::size_t sample) {
  if (config.exact) return ReadoutMode::exact_mode();
  return ReadoutMode::shots_mode(config.shots, derive_seed(config.seed, {evaluation, sample}), config.noise);
}

std::vector<double> predict_batch(const QrnnConfig& config, std::span<const double> params,
                                  const std::vector<std::vector<Circuit>>& step_maps, const TrainConfig& mode,
                                  std::uint64_t evaluation) {
  std::vector<double> out(step_maps.size());
  parallel_for(
      step_maps.size(),
      [&](std::size_t m) {
        const Circuit circuit = build_circuit(config, params, step_maps[m]);
        out[m] = readout_probability(config, circuit, readout_for(mode, evaluation, m));
      },
      mode.threads);
  return out;
}

namespace {

std::vector<std::vector<Circuit>> encode_all(const QrnnConfig& config, const std::vector<SequenceSample>& samples,
                                             const FeatureMap& encoder, unsigned threads) {
  std::vector<std::vector<Circuit>> maps(samples.size());
  parallel_for(
      samples.size(), [&](std::size_t m) { maps[m] = encode_sequence(config, samples[m].inputs, encoder); },
      threads);
  return maps;
}

std::vector<double> targets_of(const std::vector<SequenceSample>& samples) {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back(s.target_probability);
  return t;
}

}  // namespace

TrainResult train(const QrnnModel& model, const std::vector<SequenceSample>& samples, const FeatureMap& encoder,
                  const TrainConfig& config) {
  model.validate();
  config.validate();
  if (samples.empty()) throw std::invalid_argument("train: empty training set");
  const auto maps = encode_all(model.config, samples, encoder, config.threads);
  const auto targets = targets_of(samples);
  const BatchLoss loss = [&](std::span<const double> params, std::uint64_t evaluation) {
    return mse_loss(predict_batch(model.config, params, maps, config, evaluation), targets);
  };
  return optimize(loss, model.params, config);
}

EvalResult evaluate(const QrnnModel& model, const std::vector<SequenceSample>& samples, const FeatureMap& encoder,
                    const TrainConfig& mode) {
  model.validate();
  if (samples.empty()) throw std::invalid_argument("evaluate: empty test set");
  const auto maps = encode_all(model.config, samples, encoder, mode.threads);
  EvalResult r;
  // Evaluation numbers above any training call keep test sampling seeds disjoint.
  r.probabilities = predict_batch(model.config, model.params, maps, mode, ~std::uint64_t{0});
  r.mse = mse_loss(r.probabilities, targets_of(samples));
  const double range = model.scale.max - model.scale.min;
  r.return_mse = r.mse * range * range;
  return r;
}

void ClassicalRnn::validate() const {
  if (n_h == 0 || n_in == 0) throw std::invalid_argument("classical rnn: empty layer");
  if (params.size() != param_count(n_h, n_in)) {
    throw std::invalid_argument("classical rnn: expected " + std::to_string(param_count(n_h, n_in)) +
                                " parameters, got " + std::to_string(params.size()));
  }
}

ClassicalRnn make_classical(std::size_t n_h, std::size_t n_in, TargetScale scale, std::uint64_t seed) {
  ClassicalRnn rnn{n_h, n_in, std::vector<double>(ClassicalRnn::param_count(n_h, n_in)), scale};
  Rng rng(derive_seed(seed, {0xC1A5}));
  for (double& p : rnn.params) p = uniform01(rng) - 0.5;
  return rnn;
}

double classical_forward(const ClassicalRnn& rnn, std::span<const double> params, const Sequence& sequence) {
  if (params.size() != ClassicalRnn::param_count(rnn.n_h, rnn.n_in)) {
    throw std::invalid_argument("classical_forward: parameter count mismatch");
  }
  const std::size_t nh = rnn.n_h;
  const std::size_t ni = rnn.n_in;
  const double* U = params.data();
  const double* V = U + nh;
  const double* W = V + nh * ni;
  const double* b = W + nh * nh;
  std::vector<double> h(nh, 0.0);
  std::vector<double> next(nh);
  for (const auto& x : sequence) {
    if (x.size() != ni) {
      throw std::invalid_argument("classical_forward: step has " + std::to_string(x.size()) + " inputs, expected " +
                                  std::to_string(ni));
    }
    for (std::size_t r = 0; r < nh; ++r) {
      double a = b[r];
      for (std::size_t c = 0; c < ni; ++c) a += V[r * ni + c] * x[c];
      for (std::size_t c = 0; c < nh; ++c) a += W[r * nh + c] * h[c];
      next[r] = std::tanh(a);
    }
    h.swap(next);
  }
  double z = 0.0;
  for (std::size_t r = 0; r < nh; ++r) z += U[r] * h[r];
  return 1.0 / (1.0 + std::exp(-z));
}

double classical_forward(const ClassicalRnn& rnn, const Sequence& sequence) {
  rnn.validate();
  return classical_forward(rnn, rnn.params, sequence);
}

TrainResult classical_train(const ClassicalRnn& rnn, const std::vector<SequenceSample>& samples,
                            const TrainConfig& config) {
  rnn.validate();
  if (samples.empty()) throw std::invalid_argument("classical_train: empty training set");
  const auto targets = targets_of(samples);
  const BatchLoss loss = [&](std::span<const double> params, std::uint64_t) {
    std::vector<double> p(samples.size());
    for (std::size_t m = 0; m < samples.size(); ++m) p[m] = classical_forward(rnn, params, samples[m].inputs);
    return mse_loss(p, targets);
  };
  return optimize(loss, rnn.params, config);
}

EvalResult classical_evaluate(const ClassicalRnn& rnn, const std::vector<SequenceSample>& samples) {
  rnn.validate();
  if (samples.empty()) throw std::invalid_argument("classical_evaluate: empty test set");
  EvalResult r;
  for (const auto& s : samples) r.probabilities.push_back(classical_forward(rnn, rnn.params, s.inputs));
  r.mse = mse_loss(r.probabilities, targets_of(samples));
  const double range = rnn.scale.max - rnn.scale.min;
  r.return_mse = r.mse * range * range;
  return r;
}

}  // namespace qrnn
