#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qrnn/circuit.hpp"

namespace qrnn {

using cplx = std::complex<double>;

/// Dense pure state over n qubits; starts in |0...0>.
class StateVector {
 public:
  StateVector() : StateVector(0) {}
  explicit StateVector(int n_qubits);

  /// Takes ownership of `amplitudes`; the length must be a power of two.
  static StateVector from_amplitudes(std::vector<cplx> amplitudes);
  /// Real amplitudes, zero-padded up to 2^n_qubits.
  static StateVector from_real(std::span<const double> amplitudes, int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const;
  std::vector<double> probabilities() const;

  /// Applies a unitary gate in place. RESET is rejected; use the simulator.
  void apply(const Gate& gate);
  void apply(const Circuit& circuit);

 private:
  int n_qubits_;
  std::vector<cplx> amps_;
};

StateVector apply_gate(StateVector state, const Gate& gate);

/// Runs a reset-free circuit from |0...0> and returns the final state.
StateVector simulate(const Circuit& circuit);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);
double fidelity(std::span<const cplx> a, std::span<const cplx> b);

namespace kernels {

// Gate kernels over a raw amplitude buffer. The buffer length may be any
// multiple of 2^(highest touched qubit + 1); higher index bits act as a batch
// index, which is how the exact engine carries a purification environment.

using Matrix2 = std::array<cplx, 4>;  // row-major [[m00, m01], [m10, m11]]

Matrix2 gate_matrix(const Gate& gate);
void apply_1q(std::span<cplx> amps, int q, const Matrix2& m);
void apply_controlled_1q(std::span<cplx> amps, int control, int target, const Matrix2& m);
void apply_x(std::span<cplx> amps, int q);
void apply_y(std::span<cplx> amps, int q);
void apply_z(std::span<cplx> amps, int q);
void apply_gate(std::span<cplx> amps, const Gate& gate);

}  // namespace kernels

}  // namespace qrnn
