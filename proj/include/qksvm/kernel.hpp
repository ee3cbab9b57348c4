#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qksvm/featuremaps.hpp"

namespace qksvm {

inline constexpr std::uint64_t kDefaultShots = 10000;

struct EstimatorMode {
  enum class Kind { Exact, Shots };
  Kind kind = Kind::Exact;
  std::uint64_t shots = 0;

  static EstimatorMode exact() { return {}; }
  static EstimatorMode with_shots(std::uint64_t s = kDefaultShots) { return {Kind::Shots, s}; }
  bool is_exact() const noexcept { return kind == Kind::Exact; }
  std::string name() const { return is_exact() ? "exact" : "shots"; }
  bool operator==(const EstimatorMode&) const = default;
};

struct KernelEstimate {
  double value = 0.0;
  std::optional<std::uint64_t> shots;
  double stderr_ = 0.0;
};

// Row-major kernel matrix with estimator metadata.
class GramMatrix {
 public:
  GramMatrix() = default;
  GramMatrix(std::size_t rows, std::size_t cols, KernelId kernel, EstimatorMode mode);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  KernelId kernel() const noexcept { return kernel_; }
  const EstimatorMode& mode() const noexcept { return mode_; }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double> row(std::size_t i) const;

  // Largest |G(i,j) - G(j,i)|; requires a square matrix.
  double asymmetry() const;
  double min_eigenvalue() const;

  void write_csv(std::ostream& os) const;
  static GramMatrix read_csv(std::istream& is);
  void save_csv(const std::string& path) const;
  static GramMatrix load_csv(const std::string& path);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  KernelId kernel_ = KernelId::QK0;
  EstimatorMode mode_;
  std::vector<double> values_;
};

// |<phi(x_i)|phi(x_j)>|^2 from two simulated statevectors.
KernelEstimate fidelity_exact(KernelId kernel, const FeatureVector& x_i, const FeatureVector& x_j);

// Fraction of all-zeros outcomes of U(x_i)^dagger U(x_j) |0>.
KernelEstimate fidelity_shots(KernelId kernel, const FeatureVector& x_i, const FeatureVector& x_j,
                              std::uint64_t shots, std::uint64_t seed);

double rbf(const FeatureVector& x_i, const FeatureVector& x_j, double gamma);
double default_gamma(const std::vector<FeatureVector>& training);

struct GramOptions {
  EstimatorMode mode;
  std::uint64_t seed = 0;
  // RBF only; nullopt means default_gamma(cols).
  std::optional<double> gamma;
};

// Entry (i, j) is k(rows[i], cols[j]). When rows and cols hold the same
// vectors the upper triangle is computed and mirrored.
GramMatrix gram(KernelId kernel, const std::vector<FeatureVector>& rows,
                const std::vector<FeatureVector>& cols, const GramOptions& options = {});

GramMatrix psd_clip(const GramMatrix& g);

struct ConcentrationRow {
  int n_qubits = 0;
  double mean = 0.0;
  double variance = 0.0;
};

struct ConcentrationOptions {
  // Forces each pair to share one random vector; the variance must then be 0.
  bool identical_pairs = false;
};

std::vector<ConcentrationRow> concentration_probe(KernelId kernel, const std::vector<int>& n_qubits_range,
                                                  int pairs, std::uint64_t seed,
                                                  const ConcentrationOptions& options = {});

}  // namespace qksvm
