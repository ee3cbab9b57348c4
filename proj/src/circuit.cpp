#include "qksvm/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qksvm/errors.hpp"
#include "qksvm/rng.hpp"

namespace qksvm {
namespace {

using Mat2 = std::array<Amplitude, 4>;  // row-major {m00, m01, m10, m11}

constexpr Amplitude kI{0.0, 1.0};

Mat2 single_qubit_matrix(GateKind kind, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  switch (kind) {
    case GateKind::H: {
      const double r = 1.0 / std::numbers::sqrt2;
      return {r, r, r, -r};
    }
    case GateKind::RX:
    case GateKind::CRX:
      return {c, -kI * s, -kI * s, c};
    case GateKind::RY:
    case GateKind::CRY:
      return {c, -s, s, c};
    case GateKind::RZ:
    case GateKind::CRZ:
      return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
    case GateKind::CNOT:
    case GateKind::CCX:
      return {0.0, 1.0, 1.0, 0.0};
  }
  return {1.0, 0.0, 0.0, 1.0};
}

void validate(const Gate& gate, int n_qubits) {
  if (static_cast<int>(gate.qubits.size()) != arity(gate.kind)) {
    throw IndexError("gate " + std::string(gate_name(gate.kind)) + " expects " +
                     std::to_string(arity(gate.kind)) + " qubit operands");
  }
  for (std::size_t a = 0; a < gate.qubits.size(); ++a) {
    const int q = gate.qubits[a];
    if (q < 0 || q >= n_qubits) {
      throw IndexError("qubit index " + std::to_string(q) + " out of range for " +
                       std::to_string(n_qubits) + "-qubit register");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (gate.qubits[b] == q) throw IndexError("repeated qubit operand " + std::to_string(q));
    }
  }
}

void check_qubit_count(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw SizeError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                    std::to_string(kMaxQubits) + "]");
  }
}

}  // namespace

QuantumState::QuantumState(int n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  check_qubit_count(n_qubits);
  if (amplitudes_.size() != (std::size_t{1} << n_qubits)) {
    throw SizeError("amplitude vector length must be 2^n_qubits");
  }
}

double QuantumState::norm() const {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return std::sqrt(sum);
}

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CRX: return "CRX";
    case GateKind::CRY: return "CRY";
    case GateKind::CRZ: return "CRZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CCX: return "CCX";
  }
  return "?";
}

bool is_parameterized(GateKind kind) {
  return kind != GateKind::H && kind != GateKind::CNOT && kind != GateKind::CCX;
}

int arity(GateKind kind) {
  switch (kind) {
    case GateKind::H:
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      return 1;
    case GateKind::CCX:
      return 3;
    default:
      return 2;
  }
}

std::string to_string(const Gate& gate) {
  std::string out(gate_name(gate.kind));
  if (is_parameterized(gate.kind)) out += "(" + std::to_string(gate.angle) + ")";
  for (std::size_t i = 0; i < gate.qubits.size(); ++i) {
    out += (i == 0 ? " q" : ",q") + std::to_string(gate.qubits[i]);
  }
  return out;
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [kind](const Gate& g) { return g.kind == kind; }));
}

std::uint64_t ShotCounts::count(const std::string& bitstring) const {
  auto it = counts.find(bitstring);
  return it == counts.end() ? 0 : it->second;
}

QuantumState zero_state(int n_qubits) {
  check_qubit_count(n_qubits);
  std::vector<Amplitude> amps(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
  amps[0] = 1.0;
  return QuantumState(n_qubits, std::move(amps));
}

void apply_gate_inplace(QuantumState& state, const Gate& gate) {
  const int n = state.n_qubits();
  validate(gate, n);
  const Mat2 m = single_qubit_matrix(gate.kind, gate.angle);
  const std::size_t target_bit = std::size_t{1} << (n - 1 - gate.target());
  std::size_t control_mask = 0;
  for (std::size_t k = 0; k + 1 < gate.qubits.size(); ++k) {
    control_mask |= std::size_t{1} << (n - 1 - gate.qubits[k]);
  }
  auto& amps = state.mutable_amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & target_bit) != 0 || (i & control_mask) != control_mask) continue;
    const std::size_t j = i | target_bit;
    const Amplitude a0 = amps[i];
    const Amplitude a1 = amps[j];
    amps[i] = m[0] * a0 + m[1] * a1;
    amps[j] = m[2] * a0 + m[3] * a1;
  }
}

QuantumState apply_gate(QuantumState state, const Gate& gate) {
  apply_gate_inplace(state, gate);
  return state;
}

QuantumState run(const Circuit& circuit) { return run(circuit, zero_state(circuit.n_qubits)); }

QuantumState run(const Circuit& circuit, QuantumState initial) {
  if (initial.n_qubits() != circuit.n_qubits) {
    throw ShapeError("initial state qubit count does not match circuit");
  }
  for (const Gate& g : circuit.gates) apply_gate_inplace(initial, g);
  return initial;
}

Circuit adjoint(const Circuit& circuit) {
  Circuit out(circuit.n_qubits);
  out.gates.reserve(circuit.gates.size());
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
    Gate g = *it;
    if (is_parameterized(g.kind)) g.angle = -g.angle;
    out.gates.push_back(std::move(g));
  }
  return out;
}

Circuit compose(const Circuit& first, const Circuit& second) {
  if (first.n_qubits != second.n_qubits) {
    throw ShapeError("cannot compose circuits on " + std::to_string(first.n_qubits) + " and " +
                     std::to_string(second.n_qubits) + " qubits");
  }
  Circuit out(first.n_qubits, first.gates);
  out.gates.insert(out.gates.end(), second.gates.begin(), second.gates.end());
  return out;
}

std::vector<std::uint64_t> sample_histogram(const QuantumState& state, std::uint64_t shots,
                                            std::uint64_t seed) {
  if (shots == 0) throw ArgumentError("shots must be at least 1");
  const auto& amps = state.amplitudes();
  std::vector<double> cumulative(amps.size());
  double running = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    running += std::norm(amps[i]);
    cumulative[i] = running;
  }
  std::vector<std::uint64_t> hist(amps.size(), 0);
  Rng rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * running;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= amps.size()) idx = amps.size() - 1;
    // Zero-probability outcomes can share a cumulative value with a neighbour.
    while (std::norm(amps[idx]) == 0.0 && idx + 1 < amps.size()) ++idx;
    ++hist[idx];
  }
  return hist;
}

ShotCounts sample(const QuantumState& state, std::uint64_t shots, std::uint64_t seed) {
  const auto hist = sample_histogram(state, shots, seed);
  ShotCounts out;
  out.shots = shots;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist[i] > 0) out.counts.emplace(bitstring(i, state.n_qubits()), hist[i]);
  }
  return out;
}

double prob_all_zero(const QuantumState& state) {
  return std::clamp(std::norm(state[0]), 0.0, 1.0);
}

Amplitude inner_product(const QuantumState& a, const QuantumState& b) {
  if (a.dimension() != b.dimension()) throw ShapeError("inner product of states of different size");
  Amplitude acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.dimension(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double fidelity(const QuantumState& a, const QuantumState& b) { return std::norm(inner_product(a, b)); }

std::string bitstring(std::size_t index, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q) {
    if ((index >> (n_qubits - 1 - q)) & 1U) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

int logical_depth(const Circuit& circuit) {
  std::vector<int> wire_depth(static_cast<std::size_t>(std::max(circuit.n_qubits, 0)), 0);
  int depth = 0;
  for (const Gate& g : circuit.gates) {
    int layer = 0;
    for (int q : g.qubits) layer = std::max(layer, wire_depth.at(static_cast<std::size_t>(q)));
    ++layer;
    for (int q : g.qubits) wire_depth[static_cast<std::size_t>(q)] = layer;
    depth = std::max(depth, layer);
  }
  return depth;
}

Circuit decompose(const Circuit& circuit) {
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  Circuit out(circuit.n_qubits);
  for (const Gate& g : circuit.gates) {
    switch (g.kind) {
      case GateKind::CRY: {
        const int c = g.qubits[0], t = g.qubits[1];
        out.add(Gate::ry(t, g.angle / 2)).add(Gate::cnot(c, t));
        out.add(Gate::ry(t, -g.angle / 2)).add(Gate::cnot(c, t));
        break;
      }
      case GateKind::CRZ: {
        const int c = g.qubits[0], t = g.qubits[1];
        out.add(Gate::rz(t, g.angle / 2)).add(Gate::cnot(c, t));
        out.add(Gate::rz(t, -g.angle / 2)).add(Gate::cnot(c, t));
        break;
      }
      case GateKind::CRX: {
        // H maps the Z axis to X, so CRX = (I x H) CRZ (I x H).
        const int c = g.qubits[0], t = g.qubits[1];
        out.add(Gate::h(t));
        out.add(Gate::rz(t, g.angle / 2)).add(Gate::cnot(c, t));
        out.add(Gate::rz(t, -g.angle / 2)).add(Gate::cnot(c, t));
        out.add(Gate::h(t));
        break;
      }
      case GateKind::CCX: {
        // Standard 6-CNOT Toffoli; T = RZ(pi/4) up to a global phase.
        const int a = g.qubits[0], b = g.qubits[1], t = g.qubits[2];
        out.add(Gate::h(t));
        out.add(Gate::cnot(b, t)).add(Gate::rz(t, -kQuarterPi));
        out.add(Gate::cnot(a, t)).add(Gate::rz(t, kQuarterPi));
        out.add(Gate::cnot(b, t)).add(Gate::rz(t, -kQuarterPi));
        out.add(Gate::cnot(a, t));
        out.add(Gate::rz(b, kQuarterPi)).add(Gate::rz(t, kQuarterPi));
        out.add(Gate::h(t));
        out.add(Gate::cnot(a, b));
        out.add(Gate::rz(a, kQuarterPi)).add(Gate::rz(b, -kQuarterPi));
        out.add(Gate::cnot(a, b));
        break;
      }
      default:
        out.add(g);
    }
  }
  return out;
}

}  // namespace qksvm
