#include "qksvm/pca.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "qksvm/errors.hpp"

namespace qksvm {

PcaModel PcaModel::truncated(std::size_t keep) const {
  if (keep > k()) throw ArgumentError("cannot truncate PCA model to more components than it holds");
  PcaModel out;
  out.mean = mean;
  out.components.assign(components.begin(), components.begin() + static_cast<std::ptrdiff_t>(keep));
  out.eigenvalues.assign(eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(keep));
  out.total_variance = total_variance;
  return out;
}

PcaModel pca_fit(const std::vector<std::vector<double>>& samples, std::size_t k) {
  const std::size_t m = samples.size();
  if (m < 2) throw ArgumentError("pca_fit: need at least 2 samples");
  const std::size_t d = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != d) throw ShapeError("pca_fit: samples of unequal length");
  }
  if (k == 0 || k > m - 1 || k > d) {
    throw ArgumentError("pca_fit: k = " + std::to_string(k) + " must be in [1, min(samples-1, dimension)]");
  }

  Eigen::MatrixXd x(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = samples[i][j];
  const Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;

  const double md = static_cast<double>(m);
  const Eigen::MatrixXd sample_gram = (x * x.transpose()) / md;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sample_gram);
  if (solver.info() != Eigen::Success) throw DegenerateDataError("pca_fit: eigensolver failed");

  PcaModel model;
  model.mean.assign(mu.data(), mu.data() + d);
  model.total_variance = sample_gram.trace();
  const double scale_floor = 1e-12 * std::max(model.total_variance, 1e-300);
  for (std::size_t c = 0; c < k; ++c) {
    // Eigen sorts ascending.
    const Eigen::Index idx = static_cast<Eigen::Index>(m - 1 - c);
    const double lambda = solver.eigenvalues()(idx);
    if (!(lambda > scale_floor)) {
      throw ArgumentError("pca_fit: k = " + std::to_string(k) + " exceeds the rank of the centred data");
    }
    Eigen::VectorXd v = x.transpose() * solver.eigenvectors().col(idx);
    v.normalize();
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.components.emplace_back(v.data(), v.data() + d);
    model.eigenvalues.push_back(lambda);
  }
  return model;
}

FeatureVector pca_transform(const PcaModel& model, const std::vector<double>& sample) {
  if (sample.size() != model.dimension()) {
    throw ShapeError("pca_transform: sample length " + std::to_string(sample.size()) + " != " +
                     std::to_string(model.dimension()));
  }
  FeatureVector scores(model.k(), 0.0);
  for (std::size_t c = 0; c < model.k(); ++c) {
    const auto& comp = model.components[c];
    double acc = 0.0;
    for (std::size_t j = 0; j < sample.size(); ++j) acc += comp[j] * (sample[j] - model.mean[j]);
    scores[c] = acc;
  }
  return scores;
}

std::vector<FeatureVector> pca_transform_all(const PcaModel& model, const std::vector<std::vector<double>>& samples) {
  std::vector<FeatureVector> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(pca_transform(model, s));
  return out;
}

std::vector<double> pca_reconstruct(const PcaModel& model, const FeatureVector& scores) {
  if (scores.size() != model.k()) throw ShapeError("pca_reconstruct: score count != component count");
  std::vector<double> out = model.mean;
  for (std::size_t c = 0; c < model.k(); ++c)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += scores[c] * model.components[c][j];
  return out;
}

std::vector<double> cumulative_ratios(const std::vector<double>& cr) {
  std::vector<double> ccr(cr.size());
  double running = 0.0;
  for (std::size_t i = 0; i < cr.size(); ++i) {
    running += cr[i];
    ccr[i] = running;
  }
  return ccr;
}

ContributionRatios contribution_ratios(const PcaModel& model) {
  if (!(model.total_variance > 0.0)) throw DegenerateDataError("contribution_ratios: data has zero variance");
  ContributionRatios out;
  for (double lambda : model.eigenvalues) out.cr.push_back(lambda / model.total_variance);
  out.ccr = cumulative_ratios(out.cr);
  return out;
}

}  // namespace qksvm
