#include "qrnn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace qrnn {

void adam_step(AdamState& state, std::span<const double> grad, std::span<double> params,
               double learning_rate) {
  if (grad.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

std::vector<double> rademacher(std::size_t n, Rng& rng) {
  std::vector<double> delta(n);
  for (double& d : delta) d = (rng() >> 63) ? 1.0 : -1.0;
  return delta;
}

std::vector<double> spsa_gradient(const LossFn& loss, std::span<const double> params, double c,
                                  Rng& rng) {
  if (!(c > 0.0)) throw std::invalid_argument("spsa_gradient: step must be positive");
  const std::vector<double> delta = rademacher(params.size(), rng);
  std::vector<double> plus(params.begin(), params.end());
  std::vector<double> minus(params.begin(), params.end());
  for (std::size_t i = 0; i < params.size(); ++i) {
    plus[i] += c * delta[i];
    minus[i] -= c * delta[i];
  }
  const double diff = (loss(plus) - loss(minus)) / (2.0 * c);
  std::vector<double> g(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) g[i] = diff * delta[i];
  return g;
}

}  // namespace qrnn
