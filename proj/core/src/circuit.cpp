#include "qrnn/circuit.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qrnn {

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::SX: return "sx";
    case GateKind::H: return "h";
    case GateKind::CX: return "cx";
    case GateKind::CY: return "cy";
    case GateKind::CZ: return "cz";
    case GateKind::RESET: return "reset";
  }
  return "?";
}

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::CX:
    case GateKind::CY:
    case GateKind::CZ:
      return 2;
    default:
      return 1;
  }
}

bool is_rotation(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

void validate_gate(const Gate& gate, int n_qubits) {
  const int arity = gate.arity();
  for (int k = 0; k < arity; ++k) {
    const int q = gate.qubits[k];
    if (q < 0 || q >= n_qubits) {
      throw std::invalid_argument("gate " + std::string(gate_name(gate.kind)) + ": qubit index " +
                                  std::to_string(q) + " out of range for " +
                                  std::to_string(n_qubits) + " qubits");
    }
  }
  if (arity == 2 && gate.qubits[0] == gate.qubits[1]) {
    throw std::invalid_argument("gate " + std::string(gate_name(gate.kind)) +
                                ": control and target must differ");
  }
  if (is_rotation(gate.kind) && !gate.angle) {
    throw std::invalid_argument("rotation gate " + std::string(gate_name(gate.kind)) +
                                " is missing its angle");
  }
  if (!is_rotation(gate.kind) && gate.angle) {
    throw std::invalid_argument("gate " + std::string(gate_name(gate.kind)) +
                                " does not take an angle");
  }
}

std::string to_string(const Gate& gate) {
  std::ostringstream out;
  out << gate_name(gate.kind);
  if (gate.angle) out << '(' << *gate.angle << ')';
  out << ' ' << gate.qubits[0];
  if (gate.arity() == 2) out << ',' << gate.qubits[1];
  return out.str();
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0) throw std::invalid_argument("circuit width must be non-negative");
}

void Circuit::set_measured_qubits(std::vector<int> qubits) {
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= n_qubits_) {
      throw std::invalid_argument("measured qubit " + std::to_string(qubits[i]) +
                                  " out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (qubits[j] == qubits[i]) throw std::invalid_argument("measured qubits must be distinct");
    }
  }
  measured_ = std::move(qubits);
}

Circuit& Circuit::add(const Gate& gate) {
  validate_gate(gate, n_qubits_);
  gates_.push_back(gate);
  return *this;
}

Circuit& Circuit::append(const Circuit& sub, std::span<const int> qubit_map) {
  if (static_cast<int>(qubit_map.size()) < sub.n_qubits()) {
    throw std::invalid_argument("qubit map shorter than appended circuit width");
  }
  gates_.reserve(gates_.size() + sub.gates_.size());
  for (Gate g : sub.gates_) {
    for (int k = 0; k < g.arity(); ++k) g.qubits[k] = qubit_map[g.qubits[k]];
    add(g);
  }
  return *this;
}

Circuit& Circuit::append(const Circuit& sub) {
  if (sub.n_qubits() > n_qubits_) {
    throw std::invalid_argument("appended circuit is wider than the target circuit");
  }
  gates_.reserve(gates_.size() + sub.gates_.size());
  for (const Gate& g : sub.gates_) gates_.push_back(g);
  return *this;
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(gates_.begin(), gates_.end(), [kind](const Gate& g) { return g.kind == kind; }));
}

std::string to_string(const Circuit& circuit) {
  std::ostringstream out;
  out << "circuit(" << circuit.n_qubits() << " qubits, " << circuit.size() << " gates)\n";
  for (const Gate& g : circuit.gates()) out << "  " << to_string(g) << '\n';
  if (!circuit.measured_qubits().empty()) {
    out << "  measure";
    for (int q : circuit.measured_qubits()) out << ' ' << q;
    out << '\n';
  }
  return out.str();
}

}  // namespace qrnn
