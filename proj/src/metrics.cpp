#include "qksvm/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "qksvm/errors.hpp"

namespace qksvm {
namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& truth) {
  if (scores.size() != truth.size()) throw ShapeError("scores and labels differ in length");
  bool pos = false, neg = false;
  for (int t : truth) {
    if (t == 1) pos = true;
    else if (t == -1) neg = true;
    else throw ArgumentError("labels must be +1 or -1");
  }
  if (!pos || !neg) throw ArgumentError("evaluation needs both classes in the ground truth");
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& truth) {
  check_inputs(scores, truth);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double positives = static_cast<double>(std::count(truth.begin(), truth.end(), 1));
  const double negatives = static_cast<double>(truth.size()) - positives;

  std::vector<RocPoint> roc{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      if (truth[order[k]] == 1) ++tp;
      else ++fp;
      ++k;
    }
    roc.push_back({static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives});
  }
  return roc;
}

double auc_trapezoid(const std::vector<RocPoint>& roc) {
  double area = 0.0;
  for (std::size_t k = 1; k < roc.size(); ++k) {
    area += (roc[k].fpr - roc[k - 1].fpr) * (roc[k].tpr + roc[k - 1].tpr) * 0.5;
  }
  return area;
}

EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& truth) {
  check_inputs(scores, truth);
  EvalReport r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] > 0.0;
    const bool actual = truth[i] == 1;
    if (predicted && actual) ++r.tp;
    else if (predicted) ++r.fp;
    else if (actual) ++r.fn;
    else ++r.tn;
  }
  r.precision = safe_ratio(static_cast<double>(r.tp), static_cast<double>(r.tp + r.fp));
  r.recall = safe_ratio(static_cast<double>(r.tp), static_cast<double>(r.tp + r.fn));
  r.f1 = r.tp == 0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(scores.size());
  r.roc_points = roc_curve(scores, truth);
  r.auc = auc_trapezoid(r.roc_points);
  return r;
}

double all_positive_f1(const std::vector<int>& truth) {
  const double p = static_cast<double>(std::count(truth.begin(), truth.end(), 1));
  if (p == 0.0) return 0.0;
  return 2.0 * p / (static_cast<double>(truth.size()) + p);
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json roc = nlohmann::json::array();
  for (const auto& p : r.roc_points) roc.push_back({p.fpr, p.tpr});
  return {{"tp", r.tp},
          {"fp", r.fp},
          {"tn", r.tn},
          {"fn", r.fn},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"accuracy", r.accuracy},
          {"auc", r.auc},
          {"roc", roc}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.tp = j.at("tp").get<std::size_t>();
  r.fp = j.at("fp").get<std::size_t>();
  r.tn = j.at("tn").get<std::size_t>();
  r.fn = j.at("fn").get<std::size_t>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.accuracy = j.at("accuracy").get<double>();
  r.auc = j.at("auc").get<double>();
  for (const auto& p : j.at("roc")) r.roc_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return r;
}

void write_roc_csv(std::ostream& os, const std::vector<RocPoint>& roc) {
  os << "FPR,TPR\n" << std::setprecision(17);
  for (const auto& p : roc) os << p.fpr << ',' << p.tpr << '\n';
}

}  // namespace qksvm
