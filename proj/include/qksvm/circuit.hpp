#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qksvm {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 20;

// Dense statevector. Qubit 0 is the most significant bit of a basis index,
// so basis state |q0 q1 ... q(n-1)> has index sum(q_k << (n-1-k)).
class QuantumState {
 public:
  QuantumState(int n_qubits, std::vector<Amplitude> amplitudes);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  const std::vector<Amplitude>& amplitudes() const noexcept { return amplitudes_; }
  std::vector<Amplitude>& mutable_amplitudes() noexcept { return amplitudes_; }
  const Amplitude& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm() const;

 private:
  int n_qubits_;
  std::vector<Amplitude> amplitudes_;
};

enum class GateKind { H, RX, RY, RZ, CRX, CRY, CRZ, CNOT, CCX };

std::string_view gate_name(GateKind kind);
bool is_parameterized(GateKind kind);
// Number of qubit operands (controls first, target last).
int arity(GateKind kind);

struct Gate {
  GateKind kind;
  std::vector<int> qubits;
  double angle = 0.0;

  int target() const { return qubits.back(); }

  static Gate h(int q) { return {GateKind::H, {q}, 0.0}; }
  static Gate rx(int q, double theta) { return {GateKind::RX, {q}, theta}; }
  static Gate ry(int q, double theta) { return {GateKind::RY, {q}, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, {q}, theta}; }
  static Gate crx(int control, int target, double theta) { return {GateKind::CRX, {control, target}, theta}; }
  static Gate cry(int control, int target, double theta) { return {GateKind::CRY, {control, target}, theta}; }
  static Gate crz(int control, int target, double theta) { return {GateKind::CRZ, {control, target}, theta}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}, 0.0}; }
  static Gate ccx(int c0, int c1, int target) { return {GateKind::CCX, {c0, c1, target}, 0.0}; }

  bool operator==(const Gate&) const = default;
};

std::string to_string(const Gate& gate);

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  explicit Circuit(int n = 0, std::vector<Gate> g = {}) : n_qubits(n), gates(std::move(g)) {}

  Circuit& add(Gate g) {
    gates.push_back(std::move(g));
    return *this;
  }
  std::size_t size() const noexcept { return gates.size(); }
  std::size_t count(GateKind kind) const;

  bool operator==(const Circuit&) const = default;
};

struct ShotCounts {
  std::uint64_t shots = 0;
  std::map<std::string, std::uint64_t> counts;

  std::uint64_t count(const std::string& bitstring) const;
};

QuantumState zero_state(int n_qubits);

void apply_gate_inplace(QuantumState& state, const Gate& gate);
QuantumState apply_gate(QuantumState state, const Gate& gate);

QuantumState run(const Circuit& circuit);
// Runs the circuit starting from an arbitrary state.
QuantumState run(const Circuit& circuit, QuantumState initial);

Circuit adjoint(const Circuit& circuit);
Circuit compose(const Circuit& first, const Circuit& second);

// Draws `shots` independent Born-rule samples. Counts are keyed by
// bitstrings written qubit 0 first.
ShotCounts sample(const QuantumState& state, std::uint64_t shots, std::uint64_t seed);
// Same draw as sample(), returned as a dense per-basis-index histogram.
std::vector<std::uint64_t> sample_histogram(const QuantumState& state, std::uint64_t shots,
                                            std::uint64_t seed);

double prob_all_zero(const QuantumState& state);

// |<a|b>|^2
double fidelity(const QuantumState& a, const QuantumState& b);
Amplitude inner_product(const QuantumState& a, const QuantumState& b);

std::string bitstring(std::size_t index, int n_qubits);

int logical_depth(const Circuit& circuit);

// Rewrites into {H, RX, RY, RZ, CNOT}. Equal to the input up to global phase.
Circuit decompose(const Circuit& circuit);
inline int decomposed_depth(const Circuit& circuit) { return logical_depth(decompose(circuit)); }

}  // namespace qksvm
