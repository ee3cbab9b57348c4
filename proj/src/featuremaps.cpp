#include "qksvm/featuremaps.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "qksvm/errors.hpp"

namespace qksvm {
namespace {

constexpr double kPi = std::numbers::pi;

void product_layer(Circuit& c, const FeatureVector& a, bool with_hadamard) {
  const int n = c.n_qubits;
  if (with_hadamard) {
    for (int q = 0; q < n; ++q) c.add(Gate::h(q));
  }
  for (int q = 0; q < n; ++q) c.add(Gate::ry(q, a[static_cast<std::size_t>(q)]));
}

// Second Toffoli control for the fan-in onto the last qubit.
int toffoli_partner(int i, int last) { return i + 1 < last ? i + 1 : 0; }

}  // namespace

std::string to_string(KernelId id) {
  if (id == KernelId::RBF) return "RBF";
  return "QK" + std::to_string(static_cast<int>(id));
}

KernelId parse_kernel_id(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (KernelId id : all_kernels()) {
    if (to_string(id) == upper) return id;
  }
  throw ArgumentError("unknown kernel '" + std::string(text) + "'");
}

std::vector<KernelId> all_kernels() {
  std::vector<KernelId> out;
  for (int k = 0; k <= static_cast<int>(KernelId::RBF); ++k) out.push_back(static_cast<KernelId>(k));
  return out;
}

int min_features(KernelId id) {
  return (id == KernelId::QK0 || id == KernelId::QK1 || id == KernelId::RBF) ? 1 : 2;
}

AngleScaler fit_scaler(const std::vector<FeatureVector>& training) {
  if (training.empty()) throw ArgumentError("fit_scaler: empty training set");
  const std::size_t dim = training.front().size();
  if (dim == 0) throw ArgumentError("fit_scaler: zero-length feature vectors");
  AngleScaler s{std::vector<double>(dim, INFINITY), std::vector<double>(dim, -INFINITY)};
  for (const auto& x : training) {
    if (x.size() != dim) throw ShapeError("fit_scaler: feature vectors of unequal length");
    for (std::size_t f = 0; f < dim; ++f) {
      if (!std::isfinite(x[f])) throw ArgumentError("fit_scaler: non-finite feature value");
      s.min[f] = std::min(s.min[f], x[f]);
      s.max[f] = std::max(s.max[f], x[f]);
    }
  }
  return s;
}

FeatureVector scale(const AngleScaler& scaler, const FeatureVector& x) {
  if (x.size() != scaler.size()) {
    throw ShapeError("scale: expected " + std::to_string(scaler.size()) + " features, got " +
                     std::to_string(x.size()));
  }
  FeatureVector out(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) {
    const double span = scaler.max[f] - scaler.min[f];
    if (span <= 0.0) {
      out[f] = kPi / 2.0;
    } else {
      out[f] = std::clamp(kPi * (x[f] - scaler.min[f]) / span, 0.0, kPi);
    }
  }
  return out;
}

std::vector<FeatureVector> scale_all(const AngleScaler& scaler, const std::vector<FeatureVector>& xs) {
  std::vector<FeatureVector> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(scale(scaler, x));
  return out;
}

Circuit build_feature_map(KernelId kernel, const FeatureVector& angles) {
  if (!is_quantum(kernel)) throw WrongFamilyError("RBF is a classical kernel and has no circuit");
  const int n = static_cast<int>(angles.size());
  if (n < min_features(kernel)) {
    throw ShapeError(to_string(kernel) + " needs at least " + std::to_string(min_features(kernel)) +
                     " features, got " + std::to_string(n));
  }
  if (n > kMaxQubits) throw SizeError("feature count exceeds qubit cap");
  auto a = [&](int i) { return angles[static_cast<std::size_t>(i)]; };
  const int last = n - 1;

  Circuit c(n);
  switch (kernel) {
    case KernelId::QK0:
      product_layer(c, angles, false);
      break;
    case KernelId::QK1:
      product_layer(c, angles, true);
      break;
    case KernelId::QK2:
    case KernelId::QK3:
      product_layer(c, angles, true);
      for (int i = 0; i + 1 < n; ++i) {
        c.add(kernel == KernelId::QK2 ? Gate::cry(i, i + 1, a(i + 1)) : Gate::crx(i, i + 1, a(i + 1)));
      }
      break;
    case KernelId::QK4:
    case KernelId::QK5:
      product_layer(c, angles, true);
      for (int i = 0; i < last; ++i) {
        c.add(Gate::cry(i, last, a(i)));
        if (kernel == KernelId::QK5) c.add(Gate::rz(last, a(i)));
      }
      break;
    case KernelId::QK6:
      product_layer(c, angles, true);
      for (int i = 0; i + 1 < n; ++i) c.add(Gate::cnot(i, i + 1)).add(Gate::ry(i + 1, a(i + 1)));
      break;
    case KernelId::QK7:
    case KernelId::QK8:
    case KernelId::QK9:
    case KernelId::QK10:
      product_layer(c, angles, true);
      for (int i = 0; i < last; ++i) {
        const int partner = toffoli_partner(i, last);
        if (kernel == KernelId::QK10 && partner != i) {
          c.add(Gate::ccx(i, partner, last));
        } else {
          c.add(Gate::cnot(i, last));
        }
        c.add(kernel == KernelId::QK8 ? Gate::rz(last, a(i)) : Gate::ry(last, a(i)));
      }
      if (kernel == KernelId::QK9 || kernel == KernelId::QK10) {
        for (int q = 0; q < n; ++q) c.add(Gate::rz(q, a(q)));
      }
      break;
    case KernelId::RBF:
      break;
  }
  return c;
}

std::optional<std::size_t> CatalogEntry::gate_count(int n) const {
  if (!quantum || n < 1) return std::nullopt;
  const std::size_t un = static_cast<std::size_t>(n);
  const std::size_t pairs = un - 1;
  switch (id) {
    case KernelId::QK0: return un;
    case KernelId::QK1: return 2 * un;
    case KernelId::QK2:
    case KernelId::QK3:
    case KernelId::QK4: return 2 * un + pairs;
    case KernelId::QK5:
    case KernelId::QK6:
    case KernelId::QK7:
    case KernelId::QK8: return 2 * un + 2 * pairs;
    case KernelId::QK9:
    case KernelId::QK10: return 3 * un + 2 * pairs;
    case KernelId::RBF: break;
  }
  return std::nullopt;
}

std::vector<CatalogEntry> kernel_catalog() {
  const std::string staircase_angle = "controlled gate on qubit i+1 uses feature i+1";
  const std::string fan_in_angle = "gate paired with control qubit i uses feature i";
  return {
      {KernelId::QK0, true, "RY(a_i) angle encoding on every qubit", "n",
       "implemented as RY encoding; a Hadamard-only layer is data independent (kernel identically 1)"},
      {KernelId::QK1, true, "H then RY(a_i) on every qubit", "2n", ""},
      {KernelId::QK2, true, "QK1 layer, then CRY(a_{i+1}) from qubit i to i+1 (staircase)", "2n + (n-1)",
       staircase_angle},
      {KernelId::QK3, true, "QK1 layer, then CRX(a_{i+1}) from qubit i to i+1 (staircase)", "2n + (n-1)",
       staircase_angle},
      {KernelId::QK4, true, "QK1 layer, then CRY(a_i) from each qubit i onto the last qubit", "2n + (n-1)",
       fan_in_angle},
      {KernelId::QK5, true, "QK4 with RZ(a_i) on the last qubit after each CRY", "2n + 2(n-1)",
       fan_in_angle},
      {KernelId::QK6, true, "QK1 layer, then staircase CNOT(i, i+1) each followed by RY(a_{i+1})",
       "2n + 2(n-1)", staircase_angle},
      {KernelId::QK7, true, "QK1 layer, then CNOT(i, last) each followed by RY(a_i) on the last qubit",
       "2n + 2(n-1)", fan_in_angle},
      {KernelId::QK8, true, "QK7 with RZ(a_i) in place of each RY on the last qubit", "2n + 2(n-1)",
       fan_in_angle},
      {KernelId::QK9, true, "QK7 followed by RZ(a_j) on every qubit", "3n + 2(n-1)", fan_in_angle},
      {KernelId::QK10, true,
       "QK9 with each CNOT(i, last) replaced by CCX(i, i+1 or 0; last); CNOT when n = 2", "3n + 2(n-1)",
       "second Toffoli control is i+1, wrapping to qubit 0; CCX rather than a 3-control X"},
      {KernelId::RBF, false, "classical radial basis function exp(-gamma |x - y|^2)", "",
       "no circuit"},
  };
}

nlohmann::json catalog_to_json(const std::vector<CatalogEntry>& catalog) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : catalog) {
    nlohmann::json j{{"id", to_string(e.id)},
                     {"quantum", e.quantum},
                     {"description", e.description},
                     {"min_features", min_features(e.id)}};
    if (e.quantum) {
      j["gate_count_formula"] = e.gate_count_formula;
    } else {
      j["gate_count_formula"] = nullptr;
    }
    j["interpretation_note"] = e.interpretation_note;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace qksvm
