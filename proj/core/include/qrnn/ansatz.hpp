#pragma once

#include <cstddef>
#include <span>

#include "qrnn/circuit.hpp"

namespace qrnn {

enum class Entanglement { Linear, Full };

/// Hardware-efficient SU(2) block: reps + 1 rotation layers (RY on every qubit,
/// then RZ on every qubit) separated by CX entangling blocks. Parameters are
/// consumed layer-major: layer l uses [2nl, 2nl + n) for RY and
/// [2nl + n, 2n(l + 1)) for RZ.
struct AnsatzTemplate {
  int n_qubits = 2;
  int reps = 1;
  Entanglement entanglement = Entanglement::Full;

  std::size_t param_count() const {
    return 2 * static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(reps + 1);
  }

  /// Appends the bound block acting on qubits[0..n_qubits).
  void append_to(Circuit& circuit, std::span<const int> qubits, std::span<const double> params) const;
  /// The bound block on qubits 0..n_qubits-1.
  Circuit bind(std::span<const double> params) const;
};

/// Throws std::invalid_argument for n_qubits < 2 or reps < 1.
AnsatzTemplate build_ansatz(int n_qubits, int reps, Entanglement entanglement);

}  // namespace qrnn
