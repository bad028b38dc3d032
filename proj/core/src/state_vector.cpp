#include "qrnn/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qrnn {

namespace kernels {

namespace {

constexpr cplx kI{0.0, 1.0};

}  // namespace

Matrix2 gate_matrix(const Gate& gate) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (gate.kind) {
    case GateKind::RX: {
      const double c = std::cos(*gate.angle / 2), s = std::sin(*gate.angle / 2);
      return {cplx{c, 0}, cplx{0, -s}, cplx{0, -s}, cplx{c, 0}};
    }
    case GateKind::RY: {
      const double c = std::cos(*gate.angle / 2), s = std::sin(*gate.angle / 2);
      return {cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
    }
    case GateKind::RZ: {
      const double h = *gate.angle / 2;
      return {std::polar(1.0, -h), 0.0, 0.0, std::polar(1.0, h)};
    }
    case GateKind::X:
    case GateKind::CX:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y:
    case GateKind::CY:
      return {0.0, -kI, kI, 0.0};
    case GateKind::CZ:
      return {1.0, 0.0, 0.0, -1.0};
    case GateKind::SX:
      return {cplx{0.5, 0.5}, cplx{0.5, -0.5}, cplx{0.5, -0.5}, cplx{0.5, 0.5}};
    case GateKind::H:
      return {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
    case GateKind::RESET:
      break;
  }
  throw std::invalid_argument("reset has no unitary matrix");
}

void apply_1q(std::span<cplx> amps, int q, const Matrix2& m) {
  const std::size_t stride = std::size_t{1} << q;
  const std::size_t n = amps.size();
  for (std::size_t base = 0; base < n; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const cplx a0 = amps[i];
      const cplx a1 = amps[i + stride];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

void apply_controlled_1q(std::span<cplx> amps, int control, int target, const Matrix2& m) {
  const std::size_t tbit = std::size_t{1} << target;
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t n = amps.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((i & cbit) == 0 || (i & tbit) != 0) continue;
    const cplx a0 = amps[i];
    const cplx a1 = amps[i | tbit];
    amps[i] = m[0] * a0 + m[1] * a1;
    amps[i | tbit] = m[2] * a0 + m[3] * a1;
  }
}

void apply_x(std::span<cplx> amps, int q) {
  const std::size_t stride = std::size_t{1} << q;
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) std::swap(amps[i], amps[i + stride]);
  }
}

void apply_y(std::span<cplx> amps, int q) {
  const std::size_t stride = std::size_t{1} << q;
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const cplx a0 = amps[i];
      amps[i] = -kI * amps[i + stride];
      amps[i + stride] = kI * a0;
    }
  }
}

void apply_z(std::span<cplx> amps, int q) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & bit) amps[i] = -amps[i];
  }
}

namespace {

void apply_rz(std::span<cplx> amps, int q, double theta) {
  const cplx lo = std::polar(1.0, -theta / 2);
  const cplx hi = std::polar(1.0, theta / 2);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= (i & bit) ? hi : lo;
}

void apply_cz(std::span<cplx> amps, int a, int b) {
  const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & mask) == mask) amps[i] = -amps[i];
  }
}

void apply_cx(std::span<cplx> amps, int control, int target) {
  const std::size_t tbit = std::size_t{1} << target;
  const std::size_t cbit = std::size_t{1} << control;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & cbit) != 0 && (i & tbit) == 0) std::swap(amps[i], amps[i | tbit]);
  }
}

}  // namespace

void apply_gate(std::span<cplx> amps, const Gate& gate) {
  switch (gate.kind) {
    case GateKind::RZ: apply_rz(amps, gate.qubits[0], *gate.angle); return;
    case GateKind::X: apply_x(amps, gate.qubits[0]); return;
    case GateKind::Y: apply_y(amps, gate.qubits[0]); return;
    case GateKind::CX: apply_cx(amps, gate.qubits[0], gate.qubits[1]); return;
    case GateKind::CZ: apply_cz(amps, gate.qubits[0], gate.qubits[1]); return;
    case GateKind::CY:
      apply_controlled_1q(amps, gate.qubits[0], gate.qubits[1], gate_matrix(gate));
      return;
    case GateKind::RESET:
      throw std::invalid_argument("reset is not a unitary gate");
    default:
      apply_1q(amps, gate.qubits[0], gate_matrix(gate));
      return;
  }
}

}  // namespace kernels

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) throw std::invalid_argument("unsupported state width");
  amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amplitudes) {
  if (amplitudes.empty() || !std::has_single_bit(amplitudes.size())) {
    throw std::invalid_argument("amplitude count must be a power of two");
  }
  StateVector s(0);
  s.n_qubits_ = std::countr_zero(amplitudes.size());
  s.amps_ = std::move(amplitudes);
  return s;
}

StateVector StateVector::from_real(std::span<const double> amplitudes, int n_qubits) {
  StateVector s(n_qubits);
  if (amplitudes.size() > s.dimension()) {
    throw std::invalid_argument("too many amplitudes for the requested width");
  }
  std::fill(s.amps_.begin(), s.amps_.end(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < amplitudes.size(); ++i) s.amps_[i] = amplitudes[i];
  return s;
}

double StateVector::norm_squared() const {
  return std::accumulate(amps_.begin(), amps_.end(), 0.0,
                         [](double acc, const cplx& a) { return acc + std::norm(a); });
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps_.size());
  for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
  return p;
}

void StateVector::apply(const Gate& gate) {
  validate_gate(gate, n_qubits_);
  kernels::apply_gate(amps_, gate);
}

void StateVector::apply(const Circuit& circuit) {
  if (circuit.n_qubits() > n_qubits_) throw std::invalid_argument("circuit wider than state");
  for (const Gate& g : circuit.gates()) apply(g);
}

StateVector apply_gate(StateVector state, const Gate& gate) {
  state.apply(gate);
  return state;
}

StateVector simulate(const Circuit& circuit) {
  StateVector state(circuit.n_qubits());
  state.apply(circuit);
  return state;
}

double fidelity(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("fidelity: dimension mismatch");
  cplx overlap{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(a[i]) * b[i];
  return std::min(1.0, std::norm(overlap));
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("fidelity: dimension mismatch");
  return fidelity(a.amplitudes(), b.amplitudes());
}

}  // namespace qrnn
