#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrnn/circuit.hpp"
#include "qrnn/state_vector.hpp"

namespace qrnn {

/// Gate-count depolarizing channel: after every 1-qubit gate a uniformly
/// chosen non-identity Pauli hits the qubit with probability p1; after every
/// 2-qubit gate one of the 15 non-identity two-qubit Paulis with probability p2.
struct NoiseSpec {
  double p1 = 0.0;
  double p2 = 0.0;

  void validate() const;
  bool is_noiseless() const { return p1 == 0.0 && p2 == 0.0; }
};

/// Outcome probabilities over a circuit's measured qubits. Outcome bit k
/// corresponds to qubits[k].
struct Distribution {
  std::vector<int> qubits;
  std::vector<double> probs;

  double probability(std::uint64_t outcome) const { return probs.at(outcome); }
  /// Probability that measured qubit number k (position in `qubits`) reads 1.
  double marginal_one(std::size_t k) const;
};

double total_variation(const Distribution& a, const Distribution& b);

struct ExactOptions {
  /// Upper bound on the simulated register: circuit width plus the
  /// environment qubits that hold retired (reset) qubits.
  int max_width = 24;
};

/// Width the purification of `circuit` would have without compressing the
/// environment: n_qubits + number of RESETs.
int purified_width(const Circuit& circuit);

/// Exact outcome probabilities. Each RESET retires its qubit into an
/// environment and substitutes a fresh |0>; the environment is kept in
/// Schmidt-compressed form, so at most 2^n_qubits columns are ever stored.
Distribution run_exact(const Circuit& circuit, const ExactOptions& options = {});

using Counts = std::map<std::uint64_t, std::uint64_t>;

/// Shot sampling with trajectory semantics: RESET is a computational-basis
/// measurement followed by a conditional X, and noise inserts random Paulis.
/// Shots that share a trajectory prefix are simulated together and split
/// binomially at every random event. Pure function of its arguments.
Counts sample(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed,
              const std::optional<NoiseSpec>& noise = std::nullopt);

/// Empirical distribution from counts over `n_measured` measured qubits.
std::vector<double> frequencies(const Counts& counts, std::size_t n_measured);

/// Outcome as a bitstring, most significant measured qubit first.
std::string format_outcome(std::uint64_t outcome, std::size_t n_measured);

}  // namespace qrnn
