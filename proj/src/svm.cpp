#include "qksvm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qksvm/errors.hpp"
#include "qksvm/rng.hpp"

namespace qksvm {
namespace {

constexpr double kEps = 1e-12;
constexpr double kSnap = 1e-10;

class SmoSolver {
 public:
  SmoSolver(const GramMatrix& k, const std::vector<int>& y, const SvmParams& p)
      : k_(k), y_(y), p_(p), m_(y.size()), alpha_(m_, 0.0), g_(m_, 0.0), b_(0.0) {}

  SvmModel solve() {
    Rng rng(p_.seed);
    std::vector<std::size_t> order(m_);
    std::iota(order.begin(), order.end(), 0);
    int sweeps = 0;
    bool converged = false;
    while (sweeps < p_.max_passes) {
      ++sweeps;
      for (std::size_t i = m_; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      std::size_t changed = 0;
      for (std::size_t i : order) {
        if (violates_kkt(i) && examine(i, rng)) ++changed;
      }
      if (changed == 0) {
        // The working bias drifts from the averaged one; re-check KKT with
        // the bias the model will actually report.
        refresh_gradient();
        b_ = averaged_bias();
        if (std::none_of(order.begin(), order.end(), [&](std::size_t i) { return violates_kkt(i); })) {
          converged = true;
          break;
        }
      }
    }
    refresh_gradient();
    SvmModel model;
    model.alpha = alpha_;
    model.labels = y_;
    model.bias = averaged_bias();
    for (std::size_t i = 0; i < m_; ++i)
      if (alpha_[i] > 0.0) model.support_indices.push_back(i);
    model.params = p_;
    model.kernel = k_.kernel();
    model.sweeps = sweeps;
    model.converged = converged;
    return model;
  }

 private:
  double error(std::size_t i) const { return g_[i] + b_ - y_[i]; }

  bool violates_kkt(std::size_t i) const {
    const double r = y_[i] * error(i);
    return (r < -p_.tol && alpha_[i] < p_.C) || (r > p_.tol && alpha_[i] > 0.0);
  }

  bool examine(std::size_t i, Rng& rng) {
    const double ei = error(i);
    std::size_t best = m_;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < m_; ++j) {
      if (j == i) continue;
      const double gap = std::abs(ei - error(j));
      if (gap > best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (best < m_ && take_step(i, best)) return true;
    // Fall back to every other partner, starting at a seeded offset.
    const std::size_t start = rng.below(m_);
    for (std::size_t s = 0; s < m_; ++s) {
      const std::size_t j = (start + s) % m_;
      if (j != i && j != best && take_step(i, j)) return true;
    }
    return false;
  }

  bool take_step(std::size_t i, std::size_t j) {
    const double a1 = alpha_[i], a2 = alpha_[j];
    const double y1 = y_[i], y2 = y_[j];
    const double e1 = error(i), e2 = error(j);
    const double s = y1 * y2;
    const double c = p_.C;
    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c, c + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c);
      hi = std::min(c, a1 + a2);
    }
    if (hi - lo < kEps) return false;
    const double k11 = k_(i, i), k22 = k_(j, j), k12 = k_(i, j);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2_new;
    if (eta > kEps) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Non-positive curvature along the pair: pick the better end point of
      // the dual restricted to (i, j). v = contribution of all other points.
      const double v1 = g_[i] - a1 * y1 * k11 - a2 * y2 * k12;
      const double v2 = g_[j] - a1 * y1 * k12 - a2 * y2 * k22;
      auto objective_at = [&](double a2_end) {
        const double a1_end = a1 + s * (a2 - a2_end);
        return a1_end + a2_end - 0.5 * (a1_end * a1_end * k11 + a2_end * a2_end * k22) -
               s * a1_end * a2_end * k12 - y1 * a1_end * v1 - y2 * a2_end * v2;
      };
      const double lo_obj = objective_at(lo), hi_obj = objective_at(hi);
      if (lo_obj > hi_obj + kEps) a2_new = lo;
      else if (hi_obj > lo_obj + kEps) a2_new = hi;
      else a2_new = a2;
    }
    // Round-off residue near a bound would otherwise count as an unbounded
    // support vector and skew the averaged bias.
    a2_new = snap(a2_new);
    if (std::abs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;
    const double a1_new = snap(std::clamp(a1 + s * (a2 - a2_new), 0.0, c));

    const double d1 = y1 * (a1_new - a1), d2 = y2 * (a2_new - a2);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    if (a1_new > 0.0 && a1_new < c) b_ = b1;
    else if (a2_new > 0.0 && a2_new < c) b_ = b2;
    else b_ = 0.5 * (b1 + b2);

    for (std::size_t t = 0; t < m_; ++t) g_[t] += d1 * k_(i, t) + d2 * k_(j, t);
    alpha_[i] = a1_new;
    alpha_[j] = a2_new;
    return true;
  }

  double snap(double a) const {
    if (a < kSnap * p_.C) return 0.0;
    if (a > p_.C * (1.0 - kSnap)) return p_.C;
    return a;
  }

  void refresh_gradient() {
    for (std::size_t t = 0; t < m_; ++t) {
      double acc = 0.0;
      for (std::size_t s = 0; s < m_; ++s) acc += alpha_[s] * y_[s] * k_(s, t);
      g_[t] = acc;
    }
  }

  double averaged_bias() const {
    double sum = 0.0;
    std::size_t free_count = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m_; ++t) {
      const double target = y_[t] - g_[t];  // bias that puts point t on its margin
      if (alpha_[t] > 0.0 && alpha_[t] < p_.C) {
        sum += target;
        ++free_count;
      } else {
        // alpha = 0 needs y f >= 1; alpha = C needs y f <= 1.
        const bool at_zero = alpha_[t] <= 0.0;
        const bool bias_below = (y_[t] > 0) == at_zero;
        if (bias_below) lower = std::max(lower, target);
        else upper = std::min(upper, target);
      }
    }
    if (free_count > 0) return sum / static_cast<double>(free_count);
    if (std::isfinite(lower) && std::isfinite(upper)) return 0.5 * (lower + upper);
    if (std::isfinite(lower)) return lower;
    if (std::isfinite(upper)) return upper;
    return 0.0;
  }

  const GramMatrix& k_;
  const std::vector<int>& y_;
  SvmParams p_;
  std::size_t m_;
  std::vector<double> alpha_;
  std::vector<double> g_;  // f(x_t) - b
  double b_;
};

}  // namespace

SvmModel svm_train_smo(const GramMatrix& gram, const std::vector<int>& labels, const SvmParams& params) {
  if (!gram.is_square()) throw ShapeError("svm_train_smo: Gram matrix must be square");
  if (gram.rows() != labels.size()) throw ShapeError("svm_train_smo: label count does not match Gram size");
  if (!(params.C > 0.0)) throw ArgumentError("svm_train_smo: C must be positive");
  if (params.max_passes < 1) throw ArgumentError("svm_train_smo: max_passes must be at least 1");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw ArgumentError("svm_train_smo: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw ArgumentError("svm_train_smo: labels contain a single class");
  return SmoSolver(gram, labels, params).solve();
}

double svm_decision(const SvmModel& model, const std::vector<double>& kernel_row) {
  if (kernel_row.size() != model.size()) {
    throw ShapeError("svm_decision: kernel row has " + std::to_string(kernel_row.size()) +
                     " entries, model has " + std::to_string(model.size()));
  }
  double score = model.bias;
  for (std::size_t i = 0; i < kernel_row.size(); ++i) score += model.alpha[i] * model.labels[i] * kernel_row[i];
  return score;
}

std::vector<double> svm_decision_all(const SvmModel& model, const GramMatrix& test_by_train) {
  std::vector<double> scores;
  scores.reserve(test_by_train.rows());
  for (std::size_t i = 0; i < test_by_train.rows(); ++i) scores.push_back(svm_decision(model, test_by_train.row(i)));
  return scores;
}

double dual_objective(const GramMatrix& gram, const std::vector<int>& labels, const std::vector<double>& alpha) {
  if (!gram.is_square() || gram.rows() != labels.size() || labels.size() != alpha.size()) {
    throw ShapeError("dual_objective: inconsistent sizes");
  }
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    linear += alpha[i];
    for (std::size_t j = 0; j < alpha.size(); ++j) quad += alpha[i] * alpha[j] * labels[i] * labels[j] * gram(i, j);
  }
  return linear - 0.5 * quad;
}

nlohmann::json to_json(const SvmModel& m) {
  return {{"kernel", to_string(m.kernel)},
          {"alpha", m.alpha},
          {"labels", m.labels},
          {"bias", m.bias},
          {"support_indices", m.support_indices},
          {"C", m.params.C},
          {"tol", m.params.tol},
          {"max_passes", m.params.max_passes},
          {"seed", m.params.seed},
          {"sweeps", m.sweeps},
          {"converged", m.converged}};
}

SvmModel svm_model_from_json(const nlohmann::json& j) {
  SvmModel m;
  try {
    m.kernel = parse_kernel_id(j.at("kernel").get<std::string>());
    m.alpha = j.at("alpha").get<std::vector<double>>();
    m.labels = j.at("labels").get<std::vector<int>>();
    m.bias = j.at("bias").get<double>();
    m.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
    m.params.C = j.at("C").get<double>();
    m.params.tol = j.at("tol").get<double>();
    m.params.max_passes = j.at("max_passes").get<int>();
    m.params.seed = j.at("seed").get<std::uint64_t>();
    m.sweeps = j.at("sweeps").get<int>();
    m.converged = j.at("converged").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("SVM model JSON: ") + e.what());
  }
  if (m.alpha.size() != m.labels.size()) throw ShapeError("SVM model JSON: alpha and labels differ in length");
  return m;
}

}  // namespace qksvm
