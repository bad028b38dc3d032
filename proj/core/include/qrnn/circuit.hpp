#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrnn {

// Qubit 0 is the least-significant bit of a basis-state index everywhere in
// this library: basis index i has qubit q in |1> iff (i >> q) & 1.

enum class GateKind : std::uint8_t { RX, RY, RZ, X, Y, SX, H, CX, CY, CZ, RESET };

std::string_view gate_name(GateKind kind);
int gate_arity(GateKind kind);
bool is_rotation(GateKind kind);

/// A single circuit instruction. For two-qubit kinds qubits[0] is the control.
struct Gate {
  GateKind kind = GateKind::X;
  std::array<int, 2> qubits{-1, -1};
  std::optional<double> angle;

  int arity() const { return gate_arity(kind); }
  int control() const { return qubits[0]; }
  int target() const { return arity() == 2 ? qubits[1] : qubits[0]; }

  bool operator==(const Gate&) const = default;

  static Gate rx(int q, double theta) { return {GateKind::RX, {q, -1}, theta}; }
  static Gate ry(int q, double theta) { return {GateKind::RY, {q, -1}, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, {q, -1}, theta}; }
  static Gate x(int q) { return {GateKind::X, {q, -1}, std::nullopt}; }
  static Gate y(int q) { return {GateKind::Y, {q, -1}, std::nullopt}; }
  static Gate sx(int q) { return {GateKind::SX, {q, -1}, std::nullopt}; }
  static Gate h(int q) { return {GateKind::H, {q, -1}, std::nullopt}; }
  static Gate cx(int c, int t) { return {GateKind::CX, {c, t}, std::nullopt}; }
  static Gate cy(int c, int t) { return {GateKind::CY, {c, t}, std::nullopt}; }
  static Gate cz(int c, int t) { return {GateKind::CZ, {c, t}, std::nullopt}; }
  static Gate reset(int q) { return {GateKind::RESET, {q, -1}, std::nullopt}; }
};

/// Throws std::invalid_argument if the gate is malformed for a register of
/// `n_qubits` qubits (bad index, duplicate qubits, missing or spurious angle).
void validate_gate(const Gate& gate, int n_qubits);

std::string to_string(const Gate& gate);

/// Ordered gate list over a fixed register, plus the qubits read out at the end.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  const std::vector<int>& measured_qubits() const { return measured_; }
  void set_measured_qubits(std::vector<int> qubits);

  Circuit& add(const Gate& gate);
  Circuit& rx(int q, double theta) { return add(Gate::rx(q, theta)); }
  Circuit& ry(int q, double theta) { return add(Gate::ry(q, theta)); }
  Circuit& rz(int q, double theta) { return add(Gate::rz(q, theta)); }
  Circuit& x(int q) { return add(Gate::x(q)); }
  Circuit& y(int q) { return add(Gate::y(q)); }
  Circuit& sx(int q) { return add(Gate::sx(q)); }
  Circuit& h(int q) { return add(Gate::h(q)); }
  Circuit& cx(int c, int t) { return add(Gate::cx(c, t)); }
  Circuit& cy(int c, int t) { return add(Gate::cy(c, t)); }
  Circuit& cz(int c, int t) { return add(Gate::cz(c, t)); }
  Circuit& reset(int q) { return add(Gate::reset(q)); }

  /// Appends every gate of `sub`, relabelling sub-qubit k as qubit_map[k].
  Circuit& append(const Circuit& sub, std::span<const int> qubit_map);
  /// Appends `sub` on the identity mapping; requires sub.n_qubits() <= n_qubits().
  Circuit& append(const Circuit& sub);

  std::size_t count(GateKind kind) const;
  std::size_t reset_count() const { return count(GateKind::RESET); }
  bool has_reset() const { return reset_count() > 0; }

  bool operator==(const Circuit&) const = default;

 private:
  int n_qubits_ = 0;
  std::vector<Gate> gates_;
  std::vector<int> measured_;
};

std::string to_string(const Circuit& circuit);

}  // namespace qrnn
