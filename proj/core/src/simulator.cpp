#include "qrnn/simulator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qrnn/random.hpp"

namespace qrnn {

namespace {

constexpr double kProbabilityFloor = 1e-15;
// Relative pivot size below which a purification column is dropped.
constexpr double kRankThreshold = 1e-14;

void require_measured(const Circuit& circuit) {
  if (circuit.measured_qubits().empty()) {
    throw std::invalid_argument("circuit has no measured qubits");
  }
}

std::uint64_t outcome_of(std::size_t basis_index, const std::vector<int>& measured) {
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    out |= static_cast<std::uint64_t>((basis_index >> measured[k]) & 1U) << k;
  }
  return out;
}

void clamp_and_normalize(std::vector<double>& probs) {
  double total = 0.0;
  for (double& p : probs) {
    if (p < kProbabilityFloor) p = 0.0;
    total += p;
  }
  if (total <= 0.0) throw std::runtime_error("distribution has no probability mass");
  for (double& p : probs) p /= total;
}

// Pure state of the circuit register entangled with an environment of retired
// qubits, stored as a (2^n x cols) column-major matrix.
class PurifiedState {
 public:
  explicit PurifiedState(int n_qubits)
      : dim_(std::size_t{1} << n_qubits), cols_(1), psi_(dim_, cplx{0.0, 0.0}) {
    psi_[0] = 1.0;
  }

  void apply(const Gate& gate) { kernels::apply_gate(psi_, gate); }

  void reset(int q) {
    const std::size_t bit = std::size_t{1} << q;
    std::vector<cplx> next(psi_.size() * 2, cplx{0.0, 0.0});
    for (std::size_t e = 0; e < cols_; ++e) {
      const std::size_t src = e * dim_;
      const std::size_t moved = (cols_ + e) * dim_;
      for (std::size_t a = 0; a < dim_; ++a) {
        if (a & bit) continue;
        next[src + a] = psi_[src + a];
        next[moved + a] = psi_[src + (a | bit)];
      }
    }
    psi_ = std::move(next);
    cols_ *= 2;
    compress();
  }

  std::vector<double> distribution(const std::vector<int>& measured) const {
    std::vector<double> probs(std::size_t{1} << measured.size(), 0.0);
    for (std::size_t e = 0; e < cols_; ++e) {
      for (std::size_t a = 0; a < dim_; ++a) {
        probs[outcome_of(a, measured)] += std::norm(psi_[e * dim_ + a]);
      }
    }
    return probs;
  }

 private:
  // Column-pivoted QR of psi^dagger: psi^dagger P = Q R, so psi psi^dagger =
  // P R^dagger R P^T and psi can be replaced by P R^dagger restricted to the
  // numerically nonzero rows of R. The register's reduced state is unchanged.
  void compress() {
    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
    const auto rows = static_cast<Eigen::Index>(dim_);
    const auto cols = static_cast<Eigen::Index>(cols_);
    Eigen::Map<const Mat> psi(psi_.data(), rows, cols);
    Eigen::ColPivHouseholderQR<Mat> qr(psi.adjoint());
    qr.setThreshold(kRankThreshold);
    const Eigen::Index rank = std::max<Eigen::Index>(qr.rank(), 1);
    Mat r = qr.matrixQR().topRows(rank).template triangularView<Eigen::Upper>();
    Mat reduced = qr.colsPermutation() * r.adjoint();
    psi_.assign(reduced.data(), reduced.data() + reduced.size());
    cols_ = static_cast<std::size_t>(rank);
  }

  std::size_t dim_;
  std::size_t cols_;
  std::vector<cplx> psi_;
};

class TrajectorySampler {
 public:
  TrajectorySampler(const Circuit& circuit, std::uint64_t seed, const std::optional<NoiseSpec>& noise)
      : circuit_(circuit), rng_(seed), noise_(noise) {}

  Counts run(std::uint64_t shots) {
    std::vector<cplx> state(std::size_t{1} << circuit_.n_qubits(), cplx{0.0, 0.0});
    state[0] = 1.0;
    branch(std::move(state), 0, shots);
    return std::move(counts_);
  }

 private:
  std::uint64_t binomial(std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return std::binomial_distribution<std::uint64_t>(n, p)(rng_);
  }

  static double prob_one(const std::vector<cplx>& state, int q) {
    const std::size_t bit = std::size_t{1} << q;
    double p = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (i & bit) p += std::norm(state[i]);
    }
    return p;
  }

  // Projects qubit q onto `value`, renormalizes, and flips it back to |0>.
  static void collapse_and_reset(std::vector<cplx>& state, int q, int value, double prob) {
    const std::size_t bit = std::size_t{1} << q;
    const double scale = 1.0 / std::sqrt(prob);
    for (std::size_t i = 0; i < state.size(); ++i) {
      const bool one = (i & bit) != 0;
      if (one != (value == 1)) {
        state[i] = 0.0;
      } else {
        state[i] *= scale;
      }
    }
    if (value == 1) kernels::apply_x(state, q);
  }

  static void apply_pauli(std::vector<cplx>& state, int q, int pauli) {
    switch (pauli) {
      case 1: kernels::apply_x(state, q); break;
      case 2: kernels::apply_y(state, q); break;
      case 3: kernels::apply_z(state, q); break;
      default: break;
    }
  }

  void branch(std::vector<cplx> state, std::size_t start, std::uint64_t shots) {
    const auto& gates = circuit_.gates();
    for (std::size_t i = start; i < gates.size(); ++i) {
      const Gate& g = gates[i];
      if (g.kind == GateKind::RESET) {
        const int q = g.qubits[0];
        const double p1 = prob_one(state, q);
        const std::uint64_t n1 = p1 < kProbabilityFloor ? 0 : binomial(shots, p1);
        const std::uint64_t n0 = shots - n1;
        if (n1 > 0 && n0 > 0) {
          std::vector<cplx> other = state;
          collapse_and_reset(other, q, 1, p1);
          branch(std::move(other), i + 1, n1);
          collapse_and_reset(state, q, 0, 1.0 - p1);
          shots = n0;
        } else if (n1 > 0) {
          collapse_and_reset(state, q, 1, p1);
        } else {
          collapse_and_reset(state, q, 0, 1.0 - p1);
        }
        continue;
      }
      kernels::apply_gate(state, g);
      if (!noise_) continue;
      const bool two = g.arity() == 2;
      const double p = two ? noise_->p2 : noise_->p1;
      const std::uint64_t n_err = binomial(shots, p);
      if (n_err == 0) continue;
      const int n_paulis = two ? 15 : 3;
      std::uint64_t remaining = n_err;
      for (int j = 0; j < n_paulis && remaining > 0; ++j) {
        const std::uint64_t m =
            j == n_paulis - 1 ? remaining : binomial(remaining, 1.0 / (n_paulis - j));
        remaining -= m;
        if (m == 0) continue;
        std::vector<cplx> other = state;
        const int code = j + 1;  // 1..15, skipping identity
        apply_pauli(other, g.qubits[0], code % 4);
        if (two) apply_pauli(other, g.qubits[1], code / 4);
        branch(std::move(other), i + 1, m);
      }
      shots -= n_err;
      if (shots == 0) return;
    }
    record(state, shots);
  }

  void record(const std::vector<cplx>& state, std::uint64_t shots) {
    const auto& measured = circuit_.measured_qubits();
    std::vector<double> probs(std::size_t{1} << measured.size(), 0.0);
    for (std::size_t i = 0; i < state.size(); ++i) probs[outcome_of(i, measured)] += std::norm(state[i]);
    clamp_and_normalize(probs);
    double mass = 1.0;
    std::uint64_t remaining = shots;
    for (std::size_t o = 0; o < probs.size() && remaining > 0; ++o) {
      if (probs[o] == 0.0) continue;
      const std::uint64_t n = mass <= probs[o] ? remaining : binomial(remaining, probs[o] / mass);
      mass -= probs[o];
      remaining -= n;
      if (n > 0) counts_[o] += n;
    }
  }

  const Circuit& circuit_;
  Rng rng_;
  std::optional<NoiseSpec> noise_;
  Counts counts_;
};

}  // namespace

void NoiseSpec::validate() const {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
    throw std::invalid_argument("noise probabilities must lie in [0, 1]");
  }
}

double Distribution::marginal_one(std::size_t k) const {
  if (k >= qubits.size()) throw std::out_of_range("marginal: measured index out of range");
  double p = 0.0;
  for (std::size_t o = 0; o < probs.size(); ++o) {
    if ((o >> k) & 1U) p += probs[o];
  }
  return p;
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (a.probs.size() != b.probs.size()) throw std::invalid_argument("distribution size mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) tv += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * tv;
}

int purified_width(const Circuit& circuit) {
  return circuit.n_qubits() + static_cast<int>(circuit.reset_count());
}

Distribution run_exact(const Circuit& circuit, const ExactOptions& options) {
  require_measured(circuit);
  const int n = circuit.n_qubits();
  const std::size_t resets = circuit.reset_count();
  // Columns peak at 2^resets, or at twice the register dimension just before
  // a compression.
  const int env_qubits = std::min<int>(static_cast<int>(resets), n + 1);
  if (n + env_qubits > options.max_width) {
    throw std::runtime_error("exact simulation needs " + std::to_string(n + env_qubits) +
                             " qubits (purified width " + std::to_string(purified_width(circuit)) +
                             "), above the configured maximum of " +
                             std::to_string(options.max_width));
  }
  PurifiedState state(n);
  for (const Gate& g : circuit.gates()) {
    validate_gate(g, n);
    if (g.kind == GateKind::RESET) {
      state.reset(g.qubits[0]);
    } else {
      state.apply(g);
    }
  }
  Distribution dist{circuit.measured_qubits(), state.distribution(circuit.measured_qubits())};
  clamp_and_normalize(dist.probs);
  return dist;
}

Counts sample(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed,
              const std::optional<NoiseSpec>& noise) {
  if (shots == 0) throw std::invalid_argument("sample: shots must be at least 1");
  require_measured(circuit);
  if (noise) noise->validate();
  for (const Gate& g : circuit.gates()) validate_gate(g, circuit.n_qubits());
  std::optional<NoiseSpec> active = noise;
  if (active && active->is_noiseless()) active.reset();
  return TrajectorySampler(circuit, seed, active).run(shots);
}

std::vector<double> frequencies(const Counts& counts, std::size_t n_measured) {
  std::vector<double> f(std::size_t{1} << n_measured, 0.0);
  std::uint64_t total = 0;
  for (const auto& [outcome, n] : counts) {
    f.at(outcome) += static_cast<double>(n);
    total += n;
  }
  if (total > 0) {
    for (double& x : f) x /= static_cast<double>(total);
  }
  return f;
}

std::string format_outcome(std::uint64_t outcome, std::size_t n_measured) {
  std::string s(n_measured, '0');
  for (std::size_t k = 0; k < n_measured; ++k) {
    if ((outcome >> k) & 1U) s[n_measured - 1 - k] = '1';
  }
  return s;
}

}  // namespace qrnn
