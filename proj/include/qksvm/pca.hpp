#pragma once

#include <vector>

#include "qksvm/featuremaps.hpp"

namespace qksvm {

// Principal components of mean-centred samples. Eigenvalues are variances
// with population (1/m) normalisation.
struct PcaModel {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // k unit vectors in sample space
  std::vector<double> eigenvalues;              // descending, length k
  double total_variance = 0.0;

  std::size_t k() const noexcept { return components.size(); }
  std::size_t dimension() const noexcept { return mean.size(); }
  // The first `k` components of this model.
  PcaModel truncated(std::size_t k) const;
};

// Solves the m x m sample-space eigenproblem (m = sample count), which is the
// cheap route when the pixel dimension dwarfs the sample count.
PcaModel pca_fit(const std::vector<std::vector<double>>& samples, std::size_t k);

FeatureVector pca_transform(const PcaModel& model, const std::vector<double>& sample);
std::vector<FeatureVector> pca_transform_all(const PcaModel& model, const std::vector<std::vector<double>>& samples);
// mean + sum_i scores_i * component_i
std::vector<double> pca_reconstruct(const PcaModel& model, const FeatureVector& scores);

struct ContributionRatios {
  std::vector<double> cr;
  std::vector<double> ccr;
};

ContributionRatios contribution_ratios(const PcaModel& model);
// Running sum of per-component ratios.
std::vector<double> cumulative_ratios(const std::vector<double>& cr);

}  // namespace qksvm
