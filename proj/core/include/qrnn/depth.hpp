#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qrnn/circuit.hpp"
#include "qrnn/qrnn.hpp"

namespace qrnn {

enum class Coupling { AllToAll, LinearChain };
enum class DepthCount { AllGates, TwoQubitOnly };

std::string_view to_string(Coupling coupling);
Coupling parse_coupling(std::string_view name);

/// True for RZ, SX, X, CZ and RESET.
bool is_basis_gate(GateKind kind);

/// Rewrites every gate into {RZ, SX, X, CZ} (RESET passes through). Fixed rules:
/// RY(t) = RZ(0) SX RZ(t + pi) SX RZ(pi) and RX(t) = RZ(pi/2) SX RZ(t + pi) SX RZ(pi/2)
/// in time order, H = RZ(pi/2) SX RZ(pi/2), Y = RZ(pi) X, CX = H(t) CZ H(t),
/// CY = RZ(-pi/2)(t) CX RZ(pi/2)(t). Equal to the input up to global phase.
Circuit decompose(const Circuit& circuit);

struct RoutedCircuit {
  Circuit circuit;
  /// layout[logical] = physical qubit holding it at the end of the circuit.
  std::vector<int> layout;
  std::size_t swaps = 0;
};

/// LinearChain: before each two-qubit gate on non-neighbouring physical
/// qubits, SWAPs (three CX, each decomposed) walk the first qubit toward the
/// second. Measured qubits are remapped through the final layout. AllToAll
/// returns the input unchanged.
RoutedCircuit route(const Circuit& circuit, Coupling coupling);

/// ASAP layering: each counted gate sets its qubits' level to max(level) + 1.
int circuit_depth(const Circuit& circuit, DepthCount count = DepthCount::AllGates);

struct DepthScanConfig {
  int n_f_min = 2;
  int n_f_max = 5;
  std::vector<EncodingKind> encodings{EncodingKind::AmplitudeExact, EncodingKind::Enqode};
  std::vector<StructureKind> structures{StructureKind::Canonical, StructureKind::AlternatingF};
  int sequence_length = 3;
  int n_h = 3;
  int ansatz_reps = 1;
  Entanglement entanglement = Entanglement::Linear;
  Coupling coupling = Coupling::AllToAll;
  std::uint64_t seed = 7;
  unsigned threads = 0;
};

struct DepthRow {
  int n_f = 0;
  std::size_t features = 0;
  EncodingKind encoding = EncodingKind::AmplitudeExact;
  StructureKind structure = StructureKind::Canonical;
  int depth = 0;
  int two_qubit_depth = 0;
};

/// Builds a representative QRNN circuit per (n_f, encoding, structure) from
/// fixed random data and parameters, then decomposes, routes and measures it.
/// EnQode rows use an n_f-layer ansatz with random parameters; angle rows use
/// n_f features, amplitude rows 2^n_f.
std::vector<DepthRow> depth_scan(const DepthScanConfig& config);

std::string depth_csv(const std::vector<DepthRow>& rows);

}  // namespace qrnn
