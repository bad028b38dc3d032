#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qrnn/random.hpp"

namespace qrnn {

/// Bias-corrected Adam moments.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One Adam update of `params` in place. Throws std::invalid_argument on a
/// shape mismatch between state, gradient and parameters.
void adam_step(AdamState& state, std::span<const double> grad, std::span<double> params,
               double learning_rate);

using LossFn = std::function<double(std::span<const double>)>;

/// Two-point SPSA estimate with one Rademacher direction delta:
/// [L(x + c delta) - L(x - c delta)] / (2c) * delta. Exactly two loss calls.
std::vector<double> spsa_gradient(const LossFn& loss, std::span<const double> params, double c,
                                  Rng& rng);

/// Rademacher draw used by spsa_gradient, exposed for tests.
std::vector<double> rademacher(std::size_t n, Rng& rng);

}  // namespace qrnn
