#include "qksvm/kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qksvm/errors.hpp"
#include "qksvm/rng.hpp"

namespace qksvm {
namespace {

void require_quantum(KernelId kernel) {
  if (!is_quantum(kernel)) throw WrongFamilyError("RBF has no quantum estimator");
}

void require_same_length(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size()) {
    throw ShapeError("feature vectors differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}

Eigen::MatrixXd to_eigen(const GramMatrix& g) {
  Eigen::MatrixXd m(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) m(i, j) = g(i, j);
  return m;
}

KernelEstimate shot_estimate(const QuantumState& state, std::uint64_t shots, std::uint64_t seed) {
  const auto hist = sample_histogram(state, shots, seed);
  const double p = static_cast<double>(hist[0]) / static_cast<double>(shots);
  return {p, shots, std::sqrt(p * (1.0 - p) / static_cast<double>(shots))};
}

}  // namespace

GramMatrix::GramMatrix(std::size_t rows, std::size_t cols, KernelId kernel, EstimatorMode mode)
    : rows_(rows), cols_(cols), kernel_(kernel), mode_(mode), values_(rows * cols, 0.0) {}

std::vector<double> GramMatrix::row(std::size_t i) const {
  return {values_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

double GramMatrix::asymmetry() const {
  if (!is_square()) throw ShapeError("asymmetry of a non-square Gram matrix");
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

double GramMatrix::min_eigenvalue() const {
  if (!is_square()) throw ShapeError("eigenvalues of a non-square Gram matrix");
  if (rows_ == 0) return 0.0;
  Eigen::MatrixXd m = to_eigen(*this);
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void GramMatrix::write_csv(std::ostream& os) const {
  os << "# kernel=" << to_string(kernel_) << ",mode=" << mode_.name() << ",shots=" << mode_.shots
     << ",rows=" << rows_ << ",cols=" << cols_ << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < rows_; ++i) {
    line.str("");
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) line << ',';
      line << (*this)(i, j);
    }
    os << line.str() << '\n';
  }
}

GramMatrix GramMatrix::read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ", 0) != 0) {
    throw ParseError("Gram CSV: missing '# kernel=...' header", 0);
  }
  std::string kernel_tag, mode_name;
  std::uint64_t shots = 0;
  std::size_t rows = 0, cols = 0;
  bool have_rows = false, have_cols = false;
  std::stringstream fields(header.substr(2));
  std::string kv;
  while (std::getline(fields, kv, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("Gram CSV: malformed header field '" + kv + "'", 0);
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    try {
      if (key == "kernel") kernel_tag = value;
      else if (key == "mode") mode_name = value;
      else if (key == "shots") shots = std::stoull(value);
      else if (key == "rows") rows = std::stoull(value), have_rows = true;
      else if (key == "cols") cols = std::stoull(value), have_cols = true;
    } catch (const std::logic_error&) {
      throw ParseError("Gram CSV: bad value for '" + key + "'", 0);
    }
  }
  if (kernel_tag.empty() || !have_rows || !have_cols || (mode_name != "exact" && mode_name != "shots")) {
    throw ParseError("Gram CSV: header lacks kernel, mode, rows or cols", 0);
  }
  const EstimatorMode mode = mode_name == "exact" ? EstimatorMode::exact() : EstimatorMode::with_shots(shots);
  GramMatrix g(rows, cols, parse_kernel_id(kernel_tag), mode);
  std::string line;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw ParseError("Gram CSV: expected " + std::to_string(rows) + " rows", i + 1);
    std::stringstream cells(line);
    std::string cell;
    std::size_t j = 0;
    while (std::getline(cells, cell, ',')) {
      if (j >= cols) throw ParseError("Gram CSV: too many columns on row " + std::to_string(i), i + 1);
      try {
        g(i, j++) = std::stod(cell);
      } catch (const std::logic_error&) {
        throw ParseError("Gram CSV: bad number '" + cell + "'", i + 1);
      }
    }
    if (j != cols) throw ParseError("Gram CSV: too few columns on row " + std::to_string(i), i + 1);
  }
  return g;
}

void GramMatrix::save_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  write_csv(os);
  if (!os) throw IoError("write failed for " + path);
}

GramMatrix GramMatrix::load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  return read_csv(is);
}

KernelEstimate fidelity_exact(KernelId kernel, const FeatureVector& x_i, const FeatureVector& x_j) {
  require_quantum(kernel);
  require_same_length(x_i, x_j);
  const QuantumState a = run(build_feature_map(kernel, x_i));
  const QuantumState b = run(build_feature_map(kernel, x_j));
  return {std::min(fidelity(a, b), 1.0), std::nullopt, 0.0};
}

KernelEstimate fidelity_shots(KernelId kernel, const FeatureVector& x_i, const FeatureVector& x_j,
                              std::uint64_t shots, std::uint64_t seed) {
  require_quantum(kernel);
  require_same_length(x_i, x_j);
  if (shots == 0) throw ArgumentError("shots must be at least 1");
  const Circuit overlap = compose(build_feature_map(kernel, x_j), adjoint(build_feature_map(kernel, x_i)));
  return shot_estimate(run(overlap), shots, seed);
}

double rbf(const FeatureVector& x_i, const FeatureVector& x_j, double gamma) {
  require_same_length(x_i, x_j);
  if (!(gamma > 0.0)) throw ArgumentError("RBF gamma must be positive");
  double d2 = 0.0;
  for (std::size_t f = 0; f < x_i.size(); ++f) d2 += (x_i[f] - x_j[f]) * (x_i[f] - x_j[f]);
  return std::exp(-gamma * d2);
}

double default_gamma(const std::vector<FeatureVector>& training) {
  if (training.empty()) throw ArgumentError("default_gamma: empty training set");
  const std::size_t dim = training.front().size();
  if (dim == 0) return 1.0;
  const double m = static_cast<double>(training.size());
  double variance_sum = 0.0;
  for (std::size_t f = 0; f < dim; ++f) {
    double mean = 0.0;
    for (const auto& x : training) mean += x.at(f);
    mean /= m;
    double var = 0.0;
    for (const auto& x : training) var += (x[f] - mean) * (x[f] - mean);
    variance_sum += var / m;
  }
  const double mean_variance = variance_sum / static_cast<double>(dim);
  if (!(mean_variance > 0.0)) return 1.0;
  return 1.0 / (static_cast<double>(dim) * mean_variance);
}

GramMatrix gram(KernelId kernel, const std::vector<FeatureVector>& rows,
                const std::vector<FeatureVector>& cols, const GramOptions& options) {
  const bool symmetric = (&rows == &cols) || rows == cols;
  if (!rows.empty() && !cols.empty()) {
    for (const auto& r : rows) require_same_length(r, cols.front());
    for (const auto& c : cols) require_same_length(c, cols.front());
  }
  if (kernel == KernelId::RBF && !options.mode.is_exact()) {
    throw WrongFamilyError("RBF kernel has no shot-based estimator");
  }
  if (!options.mode.is_exact() && options.mode.shots == 0) throw ArgumentError("shots must be at least 1");

  GramMatrix g(rows.size(), cols.size(), kernel, options.mode);
  auto entry_needed = [&](std::size_t i, std::size_t j) { return !symmetric || i <= j; };

  if (kernel == KernelId::RBF) {
    const double gamma = options.gamma.value_or(cols.empty() ? 1.0 : default_gamma(cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (entry_needed(i, j)) g(i, j) = rbf(rows[i], cols[j], gamma);
  } else {
    std::vector<QuantumState> col_states;
    col_states.reserve(cols.size());
    for (const auto& c : cols) col_states.push_back(run(build_feature_map(kernel, c)));

    if (options.mode.is_exact()) {
      std::vector<QuantumState> row_states;
      row_states.reserve(rows.size());
      for (const auto& r : rows) row_states.push_back(run(build_feature_map(kernel, r)));
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
          if (entry_needed(i, j)) g(i, j) = std::min(fidelity(row_states[i], col_states[j]), 1.0);
    } else {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Circuit undo = adjoint(build_feature_map(kernel, rows[i]));
        for (std::size_t j = 0; j < cols.size(); ++j) {
          if (!entry_needed(i, j)) continue;
          const std::uint64_t entry_seed = derive_seed(options.seed, {i, j});
          g(i, j) = shot_estimate(run(undo, col_states[j]), options.mode.shots, entry_seed).value;
        }
      }
    }
  }
  if (symmetric) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

GramMatrix psd_clip(const GramMatrix& g) {
  if (!g.is_square()) throw ShapeError("psd_clip requires a square Gram matrix");
  GramMatrix out = g;
  if (g.rows() == 0) return out;
  Eigen::MatrixXd m = to_eigen(g);
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& v = solver.eigenvectors();
  const Eigen::MatrixXd rebuilt = v * clipped.asDiagonal() * v.transpose();
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      out(i, j) = 0.5 * (rebuilt(i, j) + rebuilt(j, i));
  return out;
}

std::vector<ConcentrationRow> concentration_probe(KernelId kernel, const std::vector<int>& n_qubits_range,
                                                  int pairs, std::uint64_t seed,
                                                  const ConcentrationOptions& options) {
  require_quantum(kernel);
  if (n_qubits_range.empty()) throw ArgumentError("concentration_probe: empty qubit range");
  if (pairs < 2) throw ArgumentError("concentration_probe: need at least 2 pairs");
  std::vector<ConcentrationRow> table;
  for (int n : n_qubits_range) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(n)}));
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(pairs));
    for (int p = 0; p < pairs; ++p) {
      FeatureVector x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
      for (auto& v : x) v = rng.uniform(0.0, std::numbers::pi);
      for (auto& v : y) v = rng.uniform(0.0, std::numbers::pi);
      if (options.identical_pairs) y = x;
      values.push_back(fidelity_exact(kernel, x, y).value);
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
    table.push_back({n, mean, var});
  }
  return table;
}

}  // namespace qksvm
