#include "qrnn/ansatz.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrnn {

AnsatzTemplate build_ansatz(int n_qubits, int reps, Entanglement entanglement) {
  if (n_qubits < 2) throw std::invalid_argument("ansatz needs at least 2 qubits");
  if (reps < 1) throw std::invalid_argument("ansatz needs at least one repetition");
  return AnsatzTemplate{n_qubits, reps, entanglement};
}

void AnsatzTemplate::append_to(Circuit& circuit, std::span<const int> qubits,
                               std::span<const double> params) const {
  const auto n = static_cast<std::size_t>(n_qubits);
  if (qubits.size() != n) throw std::invalid_argument("ansatz: qubit list size mismatch");
  if (params.size() != param_count()) {
    throw std::invalid_argument("ansatz: expected " + std::to_string(param_count()) +
                                " parameters, got " + std::to_string(params.size()));
  }
  std::size_t p = 0;
  for (int layer = 0; layer <= reps; ++layer) {
    if (layer > 0) {
      if (entanglement == Entanglement::Linear) {
        for (std::size_t q = 0; q + 1 < n; ++q) circuit.cx(qubits[q], qubits[q + 1]);
      } else {
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = a + 1; b < n; ++b) circuit.cx(qubits[a], qubits[b]);
        }
      }
    }
    for (std::size_t q = 0; q < n; ++q) circuit.ry(qubits[q], params[p + q]);
    for (std::size_t q = 0; q < n; ++q) circuit.rz(qubits[q], params[p + n + q]);
    p += 2 * n;
  }
}

Circuit AnsatzTemplate::bind(std::span<const double> params) const {
  Circuit c(n_qubits);
  std::vector<int> qubits(static_cast<std::size_t>(n_qubits));
  std::iota(qubits.begin(), qubits.end(), 0);
  append_to(c, qubits, params);
  return c;
}

}  // namespace qrnn
