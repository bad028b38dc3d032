#pragma once

// Reference semantics for tests: dense unitaries built from Kronecker
// products and a density-matrix channel for RESET. Shares no code with the
// simulator kernels.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qrnn/circuit.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Eigen::Matrix2cd single(const qrnn::Gate& g) {
  const cplx i{0.0, 1.0};
  Eigen::Matrix2cd m;
  const double t = g.angle.value_or(0.0);
  switch (g.kind) {
    case qrnn::GateKind::RX: m << std::cos(t / 2), -i * std::sin(t / 2), -i * std::sin(t / 2), std::cos(t / 2); break;
    case qrnn::GateKind::RY: m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2); break;
    case qrnn::GateKind::RZ: m << std::exp(-i * (t / 2)), 0, 0, std::exp(i * (t / 2)); break;
    case qrnn::GateKind::X:
    case qrnn::GateKind::CX: m << 0, 1, 1, 0; break;
    case qrnn::GateKind::Y:
    case qrnn::GateKind::CY: m << 0, -i, i, 0; break;
    case qrnn::GateKind::CZ: m << 1, 0, 0, -1; break;
    case qrnn::GateKind::SX: m << cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5); break;
    case qrnn::GateKind::H: m << 1, 1, 1, -1; m /= std::sqrt(2.0); break;
    default: m.setIdentity(); break;
  }
  return m;
}

// Operator acting as `op` on qubit q (qubit 0 least significant) of n qubits.
inline Mat embed(const Eigen::Matrix2cd& op, int q, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = n - 1; k >= 0; --k) {
    const Mat f = (k == q) ? Mat(op) : Mat(Mat::Identity(2, 2));
    Mat next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(r * 2, c * 2, 2, 2) = out(r, c) * f;
    out = next;
  }
  return out;
}

inline Mat unitary(const qrnn::Gate& g, int n) {
  if (qrnn::gate_arity(g.kind) == 1) return embed(single(g), g.qubits[0], n);
  Eigen::Matrix2cd p0, p1;
  p0 << 1, 0, 0, 0;
  p1 << 0, 0, 0, 1;
  return embed(p0, g.qubits[0], n) + embed(p1, g.qubits[0], n) * embed(single(g), g.qubits[1], n);
}

inline Vec basis(int n, std::size_t index = 0) {
  Vec v = Vec::Zero(Eigen::Index{1} << n);
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

// Statevector of a reset-free circuit.
inline Vec state(const qrnn::Circuit& c) {
  Vec v = basis(c.n_qubits());
  for (const auto& g : c.gates()) v = unitary(g, c.n_qubits()) * v;
  return v;
}

// Density matrix with RESET as the channel K0 = |0><0|, K1 = |0><1|.
inline Mat density(const qrnn::Circuit& c) {
  const int n = c.n_qubits();
  Vec v0 = basis(n);
  Mat rho = v0 * v0.adjoint();
  for (const auto& g : c.gates()) {
    if (g.kind == qrnn::GateKind::RESET) {
      Eigen::Matrix2cd k0, k1;
      k0 << 1, 0, 0, 0;
      k1 << 0, 1, 0, 0;
      const Mat a = embed(k0, g.qubits[0], n);
      const Mat b = embed(k1, g.qubits[0], n);
      rho = a * rho * a.adjoint() + b * rho * b.adjoint();
    } else {
      const Mat u = unitary(g, n);
      rho = u * rho * u.adjoint();
    }
  }
  return rho;
}

// Outcome distribution over `measured` (bit k of the outcome = measured[k]).
inline std::vector<double> distribution(const Mat& rho, const std::vector<int>& measured) {
  std::vector<double> p(std::size_t{1} << measured.size(), 0.0);
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    std::size_t o = 0;
    for (std::size_t k = 0; k < measured.size(); ++k) o |= ((static_cast<std::size_t>(i) >> measured[k]) & 1U) << k;
    p[o] += rho(i, i).real();
  }
  return p;
}

inline double fidelity(const Vec& a, const Vec& b) { return std::norm(a.dot(b)); }

// Random gate on n qubits drawn from every non-RESET kind.
inline qrnn::Gate random_gate(std::mt19937_64& rng, int n) {
  using qrnn::Gate;
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  const int kinds = n >= 2 ? 10 : 7;
  const int kind = std::uniform_int_distribution<int>(0, kinds - 1)(rng);
  const int a = qubit(rng);
  int b = qubit(rng);
  while (n >= 2 && b == a) b = qubit(rng);
  switch (kind) {
    case 0: return Gate::rx(a, angle(rng));
    case 1: return Gate::ry(a, angle(rng));
    case 2: return Gate::rz(a, angle(rng));
    case 3: return Gate::x(a);
    case 4: return Gate::y(a);
    case 5: return Gate::sx(a);
    case 6: return Gate::h(a);
    case 7: return Gate::cx(a, b);
    case 8: return Gate::cy(a, b);
    default: return Gate::cz(a, b);
  }
}

inline qrnn::Circuit random_circuit(std::mt19937_64& rng, int n, int gates, int resets = 0) {
  qrnn::Circuit c(n);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  std::vector<int> reset_at;
  for (int r = 0; r < resets; ++r) reset_at.push_back(std::uniform_int_distribution<int>(1, gates - 1)(rng));
  for (int k = 0; k < gates; ++k) {
    for (int at : reset_at)
      if (at == k) c.reset(qubit(rng));
    c.add(random_gate(rng, n));
  }
  return c;
}

}  // namespace oracle
