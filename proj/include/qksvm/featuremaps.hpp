#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qksvm/circuit.hpp"

namespace qksvm {

using FeatureVector = std::vector<double>;

enum class KernelId { QK0, QK1, QK2, QK3, QK4, QK5, QK6, QK7, QK8, QK9, QK10, RBF };

inline constexpr int kQuantumKernelCount = 11;

std::string to_string(KernelId id);
// Accepts "QK0".."QK10" and "RBF", case-insensitive.
KernelId parse_kernel_id(std::string_view text);
std::vector<KernelId> all_kernels();
inline bool is_quantum(KernelId id) { return id != KernelId::RBF; }
// Smallest feature count the kernel's topology is defined for.
int min_features(KernelId id);

// Per-feature min-max map onto rotation angles in [0, pi].
struct AngleScaler {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const noexcept { return min.size(); }
};

AngleScaler fit_scaler(const std::vector<FeatureVector>& training);
FeatureVector scale(const AngleScaler& scaler, const FeatureVector& x);
std::vector<FeatureVector> scale_all(const AngleScaler& scaler, const std::vector<FeatureVector>& xs);

// Data-encoding circuit U(x) with one qubit per angle.
Circuit build_feature_map(KernelId kernel, const FeatureVector& angles);

struct CatalogEntry {
  KernelId id;
  bool quantum;
  std::string description;
  // Human-readable gate-count formula in n (qubits); empty for RBF.
  std::string gate_count_formula;
  // Notes where the construction is an interpretation of the circuit family.
  std::string interpretation_note;

  // Evaluates the formula; nullopt for the classical kernel.
  std::optional<std::size_t> gate_count(int n) const;
};

std::vector<CatalogEntry> kernel_catalog();
nlohmann::json catalog_to_json(const std::vector<CatalogEntry>& catalog);

}  // namespace qksvm
