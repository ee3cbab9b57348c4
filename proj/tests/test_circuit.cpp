#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qksvm/circuit.hpp"
#include "qksvm/errors.hpp"

using namespace qksvm;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void check_amplitudes(const QuantumState& s, const std::vector<Amplitude>& expected, double tol = 1e-12) {
  REQUIRE(s.dimension() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(s[i] - expected[i]) < tol);
}

QuantumState basis_state(int n, std::size_t index) {
  std::vector<Amplitude> a(std::size_t{1} << n, 0.0);
  a[index] = 1.0;
  return QuantumState(n, a);
}

// Overlap modulus squared, insensitive to global phase.
double state_fidelity(const QuantumState& a, const QuantumState& b) { return std::norm(inner_product(a, b)); }

}  // namespace

TEST_CASE("zero_state") {
  check_amplitudes(zero_state(1), {1.0, 0.0});
  check_amplitudes(zero_state(2), {1.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(zero_state(0), SizeError);
  CHECK_THROWS_AS(zero_state(21), SizeError);
  CHECK(zero_state(20).dimension() == (std::size_t{1} << 20));
}

TEST_CASE("apply_gate truth tables") {
  check_amplitudes(apply_gate(zero_state(1), Gate::h(0)), {kInvSqrt2, kInvSqrt2});
  check_amplitudes(apply_gate(zero_state(1), Gate::ry(0, std::numbers::pi)), {0.0, 1.0});
  // |10> -> |11>
  check_amplitudes(apply_gate(basis_state(2, 0b10), Gate::cnot(0, 1)), {0.0, 0.0, 0.0, 1.0});
  // |110> -> |111>
  auto s = apply_gate(basis_state(3, 0b110), Gate::ccx(0, 1, 2));
  CHECK(std::abs(s[0b111] - Amplitude(1.0)) < 1e-12);
  // control in |0> leaves the target alone
  s = apply_gate(basis_state(3, 0b010), Gate::ccx(0, 1, 2));
  CHECK(std::abs(s[0b010] - Amplitude(1.0)) < 1e-12);
}

TEST_CASE("apply_gate rejects bad operands") {
  CHECK_THROWS_AS(apply_gate(zero_state(2), Gate::h(2)), IndexError);
  CHECK_THROWS_AS(apply_gate(zero_state(2), Gate::cnot(1, 1)), IndexError);
  CHECK_THROWS_AS(apply_gate(zero_state(2), Gate::ry(-1, 0.3)), IndexError);
  CHECK_THROWS_AS(apply_gate(zero_state(2), Gate{GateKind::CNOT, {0}, 0.0}), IndexError);
}

TEST_CASE("rotation conventions match the matrix oracle") {
  for (GateKind kind : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
    const Gate g{kind, {0}, 0.7};
    const auto u = oracle::base_matrix(kind, 0.7);
    auto s = apply_gate(apply_gate(zero_state(1), Gate::h(0)), g);
    Eigen::VectorXcd v(2);
    v << kInvSqrt2, kInvSqrt2;
    const Eigen::VectorXcd expected = u * v;
    CHECK(std::abs(s[0] - expected(0)) < 1e-12);
    CHECK(std::abs(s[1] - expected(1)) < 1e-12);
  }
}

TEST_CASE("run") {
  check_amplitudes(run(Circuit(2)), {1.0, 0.0, 0.0, 0.0});
  check_amplitudes(run(Circuit(1, {Gate::h(0), Gate::h(0)})), {1.0, 0.0});

  // Bell pair against the explicit 4x4 product.
  const Circuit bell(2, {Gate::h(0), Gate::cnot(0, 1)});
  Eigen::MatrixXcd h(2, 2), cnot(4, 4);
  h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  cnot << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
  const Eigen::MatrixXcd u = cnot * oracle::kron(h, Eigen::MatrixXcd::Identity(2, 2));
  const Eigen::VectorXcd expected = u.col(0);
  const auto s = run(bell);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(s[static_cast<std::size_t>(i)] - expected(i)) < 1e-12);
  check_amplitudes(s, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
}

TEST_CASE("apply_gate agrees with dense matrices for n <= 3") {
  Rng rng(11);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      const Circuit c = oracle::random_circuit(n, 12, rng);
      const Eigen::VectorXcd expected = oracle::circuit_unitary(c).col(0);
      const auto got = oracle::to_vec(run(c));
      CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("adjoint") {
  const Circuit one(1, {Gate::ry(0, 0.3)});
  CHECK(adjoint(one).gates == std::vector<Gate>{Gate::ry(0, -0.3)});
  const Circuit bell(2, {Gate::h(0), Gate::cnot(0, 1)});
  CHECK(adjoint(bell).gates == std::vector<Gate>{Gate::cnot(0, 1), Gate::h(0)});

  Rng rng(5);
  const Circuit c = oracle::random_circuit(3, 5, rng);
  CHECK(prob_all_zero(run(compose(c, adjoint(c)))) > 1.0 - 1e-10);
}

TEST_CASE("compose") {
  const Circuit c(2, {Gate::h(0), Gate::cry(0, 1, 0.4)});
  CHECK(compose(Circuit(2), c) == c);
  CHECK(prob_all_zero(run(compose(c, adjoint(c)))) > 1.0 - 1e-12);
  const Circuit ab = compose(Circuit(1, {Gate::h(0)}), Circuit(1, {Gate::ry(0, 1.0)}));
  CHECK(ab.gates == std::vector<Gate>{Gate::h(0), Gate::ry(0, 1.0)});
  CHECK_THROWS_AS(compose(Circuit(1), Circuit(2)), ShapeError);
}

TEST_CASE("sample") {
  auto zero = sample(zero_state(1), 100, 1);
  CHECK(zero.shots == 100);
  CHECK(zero.count("0") == 100);
  CHECK(zero.counts.size() == 1);

  auto one = sample(basis_state(1, 1), 50, 1);
  CHECK(one.count("1") == 50);
  CHECK(one.count("0") == 0);

  const auto plus = run(Circuit(1, {Gate::h(0)}));
  const auto big = sample(plus, 100000, 2024);
  CHECK(std::abs(big.count("0") / 1e5 - 0.5) < 0.01);
  CHECK(big.count("0") + big.count("1") == 100000);

  CHECK(sample(plus, 1000, 9).counts == sample(plus, 1000, 9).counts);
  CHECK_THROWS_AS(sample(plus, 0, 1), ArgumentError);
}

TEST_CASE("sampled frequencies stay inside a 5-sigma band") {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const auto state = run(oracle::random_circuit(3, 10, rng));
    const std::uint64_t shots = 100000;
    const auto counts = sample(state, shots, 1000 + trial);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < state.dimension(); ++i) {
      const double p = std::norm(state[i]);
      const double sigma = std::sqrt(p * (1 - p) / shots);
      const double freq = counts.count(bitstring(i, 3)) / static_cast<double>(shots);
      CHECK(std::abs(freq - p) <= 5 * sigma + 1e-12);
      total += counts.count(bitstring(i, 3));
    }
    CHECK(total == shots);
  }
}

TEST_CASE("bitstrings put qubit 0 first") {
  CHECK(bitstring(0b100, 3) == "100");
  auto c = sample(basis_state(3, 0b100), 10, 3);
  CHECK(c.count("100") == 10);
}

TEST_CASE("prob_all_zero") {
  CHECK(prob_all_zero(zero_state(3)) == doctest::Approx(1.0));
  CHECK(prob_all_zero(basis_state(1, 1)) == 0.0);
  CHECK(prob_all_zero(run(Circuit(1, {Gate::h(0)}))) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("logical_depth") {
  CHECK(logical_depth(Circuit(2)) == 0);
  CHECK(logical_depth(Circuit(2, {Gate::h(0), Gate::h(1)})) == 1);
  CHECK(logical_depth(Circuit(2, {Gate::h(0), Gate::cnot(0, 1), Gate::h(1)})) == 3);

  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Circuit a = oracle::random_circuit(4, 1 + static_cast<int>(rng.below(10)), rng);
    const Circuit b = oracle::random_circuit(4, 1 + static_cast<int>(rng.below(10)), rng);
    CHECK(logical_depth(compose(a, b)) <= logical_depth(a) + logical_depth(b));
  }
}

TEST_CASE("decompose") {
  const Circuit cnot(2, {Gate::cnot(0, 1)});
  CHECK(decompose(cnot) == cnot);

  const Circuit ccx(3, {Gate::ccx(0, 1, 2)});
  const Circuit d = decompose(ccx);
  CHECK(d.count(GateKind::CNOT) == 6);
  for (const auto& g : d.gates) {
    CHECK((g.kind == GateKind::H || g.kind == GateKind::RX || g.kind == GateKind::RY || g.kind == GateKind::RZ ||
           g.kind == GateKind::CNOT));
  }

  // CRY on 20 random product inputs.
  Rng rng(8);
  const Circuit cry(2, {Gate::cry(0, 1, 0.8)});
  for (int t = 0; t < 20; ++t) {
    Circuit prep(2, {Gate::ry(0, rng.uniform(0, 6.3)), Gate::rz(0, rng.uniform(0, 6.3)),
                     Gate::ry(1, rng.uniform(0, 6.3)), Gate::rx(1, rng.uniform(0, 6.3))});
    const auto a = run(cry, run(prep));
    const auto b = run(decompose(cry), run(prep));
    CHECK(state_fidelity(a, b) >= 1 - 1e-9);
  }
}

TEST_CASE("decompose preserves every basis-state magnitude") {
  Rng rng(21);
  for (int t = 0; t < 40; ++t) {
    const Circuit c = oracle::random_circuit(4, 15, rng);
    const auto a = run(c);
    const auto b = run(decompose(c));
    CHECK(state_fidelity(a, b) >= 1 - 1e-9);
    for (std::size_t i = 0; i < a.dimension(); ++i) CHECK(std::abs(std::abs(a[i]) - std::abs(b[i])) < 1e-9);
  }
}

TEST_CASE("norm preservation and unitarity round trip") {
  Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const Circuit c = oracle::random_circuit(n, 1 + static_cast<int>(rng.below(200)), rng);
    CHECK(std::abs(run(c).norm() - 1.0) < 1e-9);
    CHECK(prob_all_zero(run(compose(c, adjoint(c)))) >= 1 - 1e-10);
  }
}
