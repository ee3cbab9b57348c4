#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "qksvm/kernel.hpp"

namespace qksvm {

struct SvmParams {
  double C = 1.0;
  double tol = 1e-3;
  int max_passes = 100;
  std::uint64_t seed = 0;
};

// C-SVM dual solution on a precomputed kernel. Labels are +1 (anomaly) / -1.
struct SvmModel {
  std::vector<double> alpha;
  std::vector<int> labels;
  double bias = 0.0;
  std::vector<std::size_t> support_indices;
  SvmParams params;
  KernelId kernel = KernelId::RBF;
  int sweeps = 0;
  bool converged = false;

  std::size_t size() const noexcept { return alpha.size(); }
};

// Sequential minimal optimisation. A sweep visits every multiplier in seeded
// random order; training stops after the first sweep with no KKT violation
// beyond tol, or after max_passes sweeps.
SvmModel svm_train_smo(const GramMatrix& gram, const std::vector<int>& labels, const SvmParams& params = {});

// sum_i alpha_i y_i k_i + b for one row of kernel values against the
// training set.
double svm_decision(const SvmModel& model, const std::vector<double>& kernel_row);
std::vector<double> svm_decision_all(const SvmModel& model, const GramMatrix& test_by_train);

// sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
double dual_objective(const GramMatrix& gram, const std::vector<int>& labels, const std::vector<double>& alpha);

nlohmann::json to_json(const SvmModel& model);
SvmModel svm_model_from_json(const nlohmann::json& j);

}  // namespace qksvm
