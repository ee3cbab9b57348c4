#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qksvm {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};

// Binary classification summary with the anomaly class (+1) as positive.
struct EvalReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::vector<RocPoint> roc_points;
  double auc = 0.0;

  bool operator==(const EvalReport&) const = default;
};

// A score strictly above zero predicts +1.
EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& truth);

// One vertex per distinct score, swept from the highest score down.
std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& truth);
double auc_trapezoid(const std::vector<RocPoint>& roc);

// Scores an all-anomaly prediction: F1 = 2P / (P + N + P) with P positives.
double all_positive_f1(const std::vector<int>& truth);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
void write_roc_csv(std::ostream& os, const std::vector<RocPoint>& roc);

}  // namespace qksvm
