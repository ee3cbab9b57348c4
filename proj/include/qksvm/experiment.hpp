#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qksvm/dataset.hpp"
#include "qksvm/kernel.hpp"
#include "qksvm/metrics.hpp"
#include "qksvm/pca.hpp"
#include "qksvm/svm.hpp"

namespace qksvm {

struct ConcentrationConfig {
  KernelId kernel = KernelId::QK9;
  std::vector<int> qubits{2, 3, 4, 5, 6, 7, 8};
  int pairs = 500;
};

struct ExperimentConfig {
  // Directory in the normal/anomaly layout; synthetic data when empty.
  std::optional<std::string> directory;
  SynthConfig synth;
  int downscale_factor = 1;
  std::optional<double> binarize_threshold;

  std::vector<int> features{3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<KernelId> kernels = all_kernels();
  EstimatorMode mode;
  SvmParams svm;
  int repeats = 1;
  std::uint64_t seed = 0;
  std::size_t train_per_class = 24;
  std::size_t test_per_class = 9;
  // Draw a fresh train/test split for every repeat.
  bool resplit_per_repeat = false;
  std::optional<ConcentrationConfig> concentration;

  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct CellResult {
  KernelId kernel = KernelId::RBF;
  int features = 0;
  int repeat = 0;
  EstimatorMode mode;
  std::uint64_t seed = 0;
  std::optional<double> gamma;
  double train_min_eigenvalue = 0.0;
  bool psd_clipped = false;
  std::size_t support_vectors = 0;
  double bias = 0.0;
  bool converged = false;
  int sweeps = 0;
  std::optional<std::size_t> gate_count;
  std::optional<int> logical_depth;
  std::optional<int> decomposed_depth;
  double baseline_f1 = 0.0;
  EvalReport eval;

  bool operator==(const CellResult&) const = default;
};

struct CellAggregate {
  KernelId kernel = KernelId::RBF;
  int features = 0;
  double f1_min = 0.0, f1_mean = 0.0, f1_max = 0.0;
  double auc_min = 0.0, auc_mean = 0.0, auc_max = 0.0;

  bool operator==(const CellAggregate&) const = default;
};

struct RunReport {
  nlohmann::json config;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  ContributionRatios pca;  // from the first repeat's training split
  std::vector<CellResult> cells;
  std::vector<CellAggregate> aggregates;
  std::optional<KernelId> concentration_kernel;
  std::vector<ConcentrationRow> concentration;
  // Wall-clock seconds per cell, kept out of report.json.
  std::vector<double> cell_seconds;
};

nlohmann::json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);

// Train-only fit of PCA (k components) and the angle scaler, applied to both
// splits.
struct FeatureStage {
  PcaModel pca;
  AngleScaler scaler;
  std::vector<FeatureVector> train_angles;
  std::vector<FeatureVector> test_angles;
};

FeatureStage fit_feature_stage(const std::vector<std::vector<double>>& train,
                               const std::vector<std::vector<double>>& test, std::size_t k);
FeatureStage project_feature_stage(const PcaModel& pca_fit_on_train, const std::vector<std::vector<double>>& train,
                                   const std::vector<std::vector<double>>& test, std::size_t k);

LabeledDataset load_experiment_dataset(const ExperimentConfig& config);
LabeledDataset preprocess(const LabeledDataset& dataset, int downscale_factor, std::optional<double> binarize_threshold);

std::vector<CellAggregate> aggregate_cells(const std::vector<CellResult>& cells);

RunReport run_experiment(const ExperimentConfig& config);

// report.json, f1_vs_features.csv, roc_<kernel>_<k>.csv, depth_report.csv,
// concentration.csv (when probed) and timings.json.
std::vector<std::string> emit_report(const RunReport& report, const std::string& out_dir);

struct DepthRow {
  KernelId kernel;
  int features;
  std::size_t gates;
  int logical_depth;
  int decomposed_depth;
};

std::vector<DepthRow> depth_table(const std::vector<KernelId>& kernels, const std::vector<int>& features);
void write_depth_csv(std::ostream& os, const std::vector<DepthRow>& rows);
void write_concentration_csv(std::ostream& os, KernelId kernel, const std::vector<ConcentrationRow>& rows);

}  // namespace qksvm
