#include "qrnn/depth.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qrnn/encoding.hpp"
#include "qrnn/enqode.hpp"
#include "qrnn/parallel.hpp"
#include "qrnn/random.hpp"

namespace qrnn {

namespace {

constexpr double kPi = std::numbers::pi;

void emit_h(Circuit& out, int q) {
  out.rz(q, kPi / 2).sx(q).rz(q, kPi / 2);
}

void emit_cx(Circuit& out, int c, int t) {
  emit_h(out, t);
  out.cz(c, t);
  emit_h(out, t);
}

void emit_swap(Circuit& out, int a, int b) {
  emit_cx(out, a, b);
  emit_cx(out, b, a);
  emit_cx(out, a, b);
}

}  // namespace

std::string_view to_string(Coupling coupling) {
  return coupling == Coupling::AllToAll ? "all_to_all" : "linear";
}

Coupling parse_coupling(std::string_view name) {
  if (name == "all_to_all" || name == "all") return Coupling::AllToAll;
  if (name == "linear" || name == "linear_chain") return Coupling::LinearChain;
  throw std::invalid_argument("unknown coupling '" + std::string(name) + "'");
}

bool is_basis_gate(GateKind kind) {
  switch (kind) {
    case GateKind::RZ:
    case GateKind::SX:
    case GateKind::X:
    case GateKind::CZ:
    case GateKind::RESET:
      return true;
    default:
      return false;
  }
}

Circuit decompose(const Circuit& circuit) {
  Circuit out(circuit.n_qubits());
  for (const Gate& g : circuit.gates()) {
    const int a = g.qubits[0];
    const int b = g.qubits[1];
    switch (g.kind) {
      case GateKind::RZ:
      case GateKind::SX:
      case GateKind::X:
      case GateKind::CZ:
      case GateKind::RESET:
        out.add(g);
        break;
      case GateKind::RY:
        out.rz(a, 0.0).sx(a).rz(a, *g.angle + kPi).sx(a).rz(a, kPi);
        break;
      case GateKind::RX:
        out.rz(a, kPi / 2).sx(a).rz(a, *g.angle + kPi).sx(a).rz(a, kPi / 2);
        break;
      case GateKind::H:
        emit_h(out, a);
        break;
      case GateKind::Y:
        out.rz(a, kPi).x(a);
        break;
      case GateKind::CX:
        emit_cx(out, a, b);
        break;
      case GateKind::CY:
        out.rz(b, -kPi / 2);
        emit_cx(out, a, b);
        out.rz(b, kPi / 2);
        break;
      default:
        throw std::invalid_argument("decompose: unknown gate kind");
    }
  }
  if (!circuit.measured_qubits().empty()) out.set_measured_qubits(circuit.measured_qubits());
  return out;
}

RoutedCircuit route(const Circuit& circuit, Coupling coupling) {
  const int n = circuit.n_qubits();
  RoutedCircuit r{Circuit(n), std::vector<int>(static_cast<std::size_t>(n)), 0};
  for (int q = 0; q < n; ++q) r.layout[static_cast<std::size_t>(q)] = q;
  if (coupling == Coupling::AllToAll) {
    r.circuit = circuit;
    return r;
  }
  std::vector<int> logical_at(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) logical_at[static_cast<std::size_t>(q)] = q;
  auto phys = [&](int logical) { return r.layout[static_cast<std::size_t>(logical)]; };
  for (const Gate& g : circuit.gates()) {
    Gate mapped = g;
    if (gate_arity(g.kind) == 2) {
      const int target = phys(g.qubits[1]);
      while (std::abs(phys(g.qubits[0]) - target) > 1) {
        const int p = phys(g.qubits[0]);
        const int next = p < target ? p + 1 : p - 1;
        emit_swap(r.circuit, p, next);
        ++r.swaps;
        const int other = logical_at[static_cast<std::size_t>(next)];
        std::swap(logical_at[static_cast<std::size_t>(p)], logical_at[static_cast<std::size_t>(next)]);
        r.layout[static_cast<std::size_t>(g.qubits[0])] = next;
        r.layout[static_cast<std::size_t>(other)] = p;
      }
      mapped.qubits = {phys(g.qubits[0]), phys(g.qubits[1])};
    } else {
      mapped.qubits[0] = phys(g.qubits[0]);
    }
    r.circuit.add(mapped);
  }
  if (!circuit.measured_qubits().empty()) {
    std::vector<int> measured;
    for (int q : circuit.measured_qubits()) measured.push_back(phys(q));
    r.circuit.set_measured_qubits(std::move(measured));
  }
  return r;
}

int circuit_depth(const Circuit& circuit, DepthCount count) {
  std::vector<int> level(static_cast<std::size_t>(circuit.n_qubits()), 0);
  int depth = 0;
  for (const Gate& g : circuit.gates()) {
    const int arity = gate_arity(g.kind);
    if (count == DepthCount::TwoQubitOnly && arity != 2) continue;
    int l = 0;
    for (int k = 0; k < arity; ++k) l = std::max(l, level[static_cast<std::size_t>(g.qubits[k])]);
    ++l;
    for (int k = 0; k < arity; ++k) level[static_cast<std::size_t>(g.qubits[k])] = l;
    depth = std::max(depth, l);
  }
  return depth;
}

std::vector<DepthRow> depth_scan(const DepthScanConfig& config) {
  if (config.n_f_min < 1 || config.n_f_max < config.n_f_min) {
    throw std::invalid_argument("depth_scan: invalid n_f range");
  }
  if (config.sequence_length < 1) throw std::invalid_argument("depth_scan: sequence length must be positive");
  std::vector<DepthRow> rows;
  for (int n_f = config.n_f_min; n_f <= config.n_f_max; ++n_f) {
    for (EncodingKind enc : config.encodings) {
      for (StructureKind st : config.structures) {
        DepthRow row;
        row.n_f = n_f;
        row.encoding = enc;
        row.structure = st;
        row.features = enc == EncodingKind::Angle ? static_cast<std::size_t>(n_f) : std::size_t{1} << n_f;
        rows.push_back(row);
      }
    }
  }
  parallel_for(
      rows.size(),
      [&](std::size_t i) {
        DepthRow& row = rows[i];
        // Data and parameters depend only on (n_f, encoding), so both
        // structures of a point see identical inputs.
        Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(row.n_f),
                                          static_cast<std::uint64_t>(row.encoding)}));
        std::uniform_real_distribution<double> unit(0.05, 1.0);
        std::uniform_real_distribution<double> angle(-kPi, kPi);
        QrnnConfig qc;
        qc.n_h = config.n_h;
        qc.n_f = row.n_f;
        qc.encoding = row.encoding;
        qc.structure = row.structure;
        qc.ansatz_reps = config.ansatz_reps;
        qc.entanglement = config.entanglement;
        std::vector<Circuit> maps;
        for (int t = 0; t < config.sequence_length; ++t) {
          if (row.encoding == EncodingKind::Enqode) {
            const EnqodeAnsatz ansatz{row.n_f, row.n_f};
            std::vector<double> theta(ansatz.param_count());
            for (double& v : theta) v = angle(rng);
            maps.push_back(ansatz.bind(theta));
          } else {
            FeatureRow x(row.features);
            for (double& v : x) v = unit(rng);
            maps.push_back(row.encoding == EncodingKind::Angle ? angle_feature_map(x)
                                                               : amplitude_qsp(normalize_l2(x)));
          }
        }
        std::vector<double> params(param_count(qc));
        for (double& v : params) v = angle(rng);
        const Circuit routed = route(decompose(build_circuit(qc, params, maps)), config.coupling).circuit;
        row.depth = circuit_depth(routed, DepthCount::AllGates);
        row.two_qubit_depth = circuit_depth(routed, DepthCount::TwoQubitOnly);
      },
      config.threads);
  return rows;
}

std::string depth_csv(const std::vector<DepthRow>& rows) {
  std::ostringstream os;
  os << "n_f,features,encoding,structure,depth,two_qubit_depth\n";
  for (const auto& r : rows) {
    os << r.n_f << ',' << r.features << ',' << to_string(r.encoding) << ',' << to_string(r.structure) << ','
       << r.depth << ',' << r.two_qubit_depth << '\n';
  }
  return os.str();
}

}  // namespace qrnn
