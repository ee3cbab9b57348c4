#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qksvm/errors.hpp"
#include "qksvm/featuremaps.hpp"
#include "qksvm/kernel.hpp"
#include "qksvm/rng.hpp"

using namespace qksvm;

namespace {

constexpr double kPi = std::numbers::pi;

FeatureVector random_angles(Rng& rng, int n) {
  FeatureVector a(static_cast<std::size_t>(n));
  for (auto& v : a) v = rng.uniform(0.0, kPi);
  return a;
}

std::vector<KernelId> quantum_kernels() {
  std::vector<KernelId> out;
  for (KernelId k : all_kernels())
    if (is_quantum(k)) out.push_back(k);
  return out;
}

}  // namespace

TEST_CASE("kernel ids round trip through text") {
  for (KernelId k : all_kernels()) CHECK(parse_kernel_id(to_string(k)) == k);
  CHECK(parse_kernel_id("qk9") == KernelId::QK9);
  CHECK_THROWS_AS(parse_kernel_id("QK11"), ArgumentError);
  CHECK(quantum_kernels().size() == kQuantumKernelCount);
}

TEST_CASE("fit_scaler") {
  auto s = fit_scaler({{0.0}, {2.0}});
  CHECK(s.min == std::vector<double>{0.0});
  CHECK(s.max == std::vector<double>{2.0});

  s = fit_scaler({{1.0}, {1.0}});
  CHECK(scale(s, {1.0})[0] == doctest::Approx(kPi / 2));
  CHECK(scale(s, {7.0})[0] == doctest::Approx(kPi / 2));

  s = fit_scaler({{0.0, -1.0}, {4.0, 3.0}});
  CHECK(s.min == std::vector<double>{0.0, -1.0});
  CHECK(s.max == std::vector<double>{4.0, 3.0});

  CHECK_THROWS_AS(fit_scaler({}), ArgumentError);
  CHECK_THROWS_AS(fit_scaler({{NAN}}), ArgumentError);
  CHECK_THROWS_AS(fit_scaler({{1.0}, {1.0, 2.0}}), ShapeError);
}

TEST_CASE("scale") {
  const auto s = fit_scaler({{0.0}, {2.0}});
  CHECK(scale(s, {1.0})[0] == doctest::Approx(kPi / 2));
  CHECK(scale(s, {-5.0})[0] == 0.0);
  CHECK(scale(s, {2.0})[0] == doctest::Approx(kPi));
  CHECK(scale(s, {9.0})[0] == kPi);
  CHECK_THROWS_AS(scale(s, {1.0, 2.0}), ShapeError);
}

TEST_CASE("QK1 single qubit is H then RY") {
  const Circuit c = build_feature_map(KernelId::QK1, {0.42});
  CHECK(c.gates == std::vector<Gate>{Gate::h(0), Gate::ry(0, 0.42)});
}

TEST_CASE("QK9 at four qubits has 18 gates") {
  const Circuit c = build_feature_map(KernelId::QK9, {0.1, 0.2, 0.3, 0.4});
  CHECK(c.size() == 18);
  CHECK(c.count(GateKind::H) == 4);
  CHECK(c.count(GateKind::RY) == 7);
  CHECK(c.count(GateKind::CNOT) == 3);
  CHECK(c.count(GateKind::RZ) == 4);
  // CNOTs fan in onto the last qubit.
  for (const auto& g : c.gates)
    if (g.kind == GateKind::CNOT) CHECK(g.target() == 3);
}

TEST_CASE("QK0 with zero angles is the identity") {
  const auto s = run(build_feature_map(KernelId::QK0, {0.0, 0.0, 0.0}));
  CHECK(prob_all_zero(s) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("construction details") {
  const FeatureVector a{0.1, 0.2, 0.3, 0.4};
  SUBCASE("QK2 staircase uses the target feature") {
    const Circuit c = build_feature_map(KernelId::QK2, a);
    CHECK(c.gates.back() == Gate::cry(2, 3, 0.4));
    CHECK(c.gates[8] == Gate::cry(0, 1, 0.2));
  }
  SUBCASE("QK3 uses CRX") {
    CHECK(build_feature_map(KernelId::QK3, a).count(GateKind::CRX) == 3);
  }
  SUBCASE("QK5 interleaves RZ on the last qubit") {
    const Circuit c = build_feature_map(KernelId::QK5, a);
    CHECK(c.gates[8] == Gate::cry(0, 3, 0.1));
    CHECK(c.gates[9] == Gate::rz(3, 0.1));
  }
  SUBCASE("QK6 staircase CNOT then RY") {
    const Circuit c = build_feature_map(KernelId::QK6, a);
    CHECK(c.gates[8] == Gate::cnot(0, 1));
    CHECK(c.gates[9] == Gate::ry(1, 0.2));
  }
  SUBCASE("QK8 swaps RY for RZ") {
    const Circuit c = build_feature_map(KernelId::QK8, a);
    CHECK(c.gates[9] == Gate::rz(3, 0.1));
    CHECK(c.count(GateKind::RY) == 4);
  }
  SUBCASE("QK10 Toffoli controls wrap to qubit 0") {
    const Circuit c = build_feature_map(KernelId::QK10, a);
    CHECK(c.count(GateKind::CCX) == 3);
    CHECK(c.gates[8] == Gate::ccx(0, 1, 3));
    CHECK(c.gates[10] == Gate::ccx(1, 2, 3));
    CHECK(c.gates[12] == Gate::ccx(2, 0, 3));
  }
  SUBCASE("QK10 on two qubits falls back to CNOT") {
    const Circuit c = build_feature_map(KernelId::QK10, {0.5, 0.6});
    CHECK(c.count(GateKind::CCX) == 0);
    CHECK(c.count(GateKind::CNOT) == 1);
  }
}

TEST_CASE("build_feature_map errors") {
  CHECK_THROWS_AS(build_feature_map(KernelId::RBF, {0.1, 0.2}), WrongFamilyError);
  CHECK_THROWS_AS(build_feature_map(KernelId::QK2, {0.1}), ShapeError);
  CHECK_THROWS_AS(build_feature_map(KernelId::QK0, {}), ShapeError);
  CHECK_NOTHROW(build_feature_map(KernelId::QK1, {0.1}));
}

TEST_CASE("catalog gate counts match built circuits") {
  const auto catalog = kernel_catalog();
  CHECK(catalog.size() == 12);
  Rng rng(4);
  for (const auto& e : catalog) {
    if (!e.quantum) {
      CHECK(e.id == KernelId::RBF);
      CHECK_FALSE(e.gate_count(4).has_value());
      continue;
    }
    for (int n = min_features(e.id); n <= 8; ++n) {
      CHECK(*e.gate_count(n) == build_feature_map(e.id, random_angles(rng, n)).size());
    }
  }
  CHECK(*catalog[static_cast<int>(KernelId::QK9)].gate_count(4) == 18);
  CHECK(*catalog[0].gate_count(5) == 5);
  CHECK_FALSE(catalog[0].interpretation_note.empty());

  const auto j = catalog_to_json(catalog);
  CHECK(j.size() == 12);
  CHECK(j[11]["id"] == "RBF");
  CHECK(j[11]["quantum"] == false);
  CHECK(j[9]["gate_count_formula"] == "3n + 2(n-1)");
}

TEST_CASE("feature map properties") {
  Rng rng(2025);
  for (KernelId k : quantum_kernels()) {
    CAPTURE(to_string(k));
    for (int n = 2; n <= 8; ++n) {
      const auto a = random_angles(rng, n);
      CHECK(std::abs(run(build_feature_map(k, a)).norm() - 1.0) < 1e-10);
      CHECK(build_feature_map(k, a) == build_feature_map(k, a));
    }
    // Not a constant kernel.
    bool varies = false;
    for (int t = 0; t < 100 && !varies; ++t) {
      const auto x = random_angles(rng, 4), y = random_angles(rng, 4);
      varies = fidelity_exact(k, x, y).value < 1 - 1e-6;
    }
    CHECK(varies);
  }
}

TEST_CASE("QK1 depth does not grow with width") {
  for (int n = 1; n <= 10; ++n) CHECK(logical_depth(build_feature_map(KernelId::QK1, FeatureVector(n, 0.3))) == 2);
}

TEST_CASE("Toffoli map is at least four times deeper than QK9 once decomposed") {
  const FeatureVector a(4, 0.5);
  const int qk9 = decomposed_depth(build_feature_map(KernelId::QK9, a));
  const int qk10 = decomposed_depth(build_feature_map(KernelId::QK10, a));
  MESSAGE("decomposed depth QK9 = " << qk9 << ", QK10 = " << qk10);
  CHECK(qk10 >= 4 * qk9);
}
