#include "qksvm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "qksvm/errors.hpp"
#include "qksvm/rng.hpp"

namespace qksvm {
namespace fs = std::filesystem;

namespace {

using nlohmann::json;

constexpr std::uint64_t kStreamData = 0;
constexpr std::uint64_t kStreamSplit = 1;
constexpr std::uint64_t kStreamGram = 2;
constexpr std::uint64_t kStreamSvm = 3;

std::uint64_t kernel_code(KernelId k) { return static_cast<std::uint64_t>(k); }

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json mode_json(const EstimatorMode& m) {
  return {{"kind", m.name()}, {"shots", m.is_exact() ? json(nullptr) : json(m.shots)}};
}

EstimatorMode mode_from_json(const json& j) {
  if (j.at("kind").get<std::string>() == "exact") return EstimatorMode::exact();
  return EstimatorMode::with_shots(j.at("shots").get<std::uint64_t>());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (features.empty()) throw ArgumentError("experiment: feature list is empty");
  if (kernels.empty()) throw ArgumentError("experiment: kernel list is empty");
  if (repeats < 1) throw ArgumentError("experiment: repeats must be at least 1");
  if (downscale_factor < 1) throw ArgumentError("experiment: downscale_factor must be at least 1");
  if (train_per_class < 1 || test_per_class < 1) throw ArgumentError("experiment: split sizes must be positive");
  if (!mode.is_exact() && mode.shots == 0) throw ArgumentError("experiment: shots must be at least 1");
  if (!(svm.C > 0.0)) throw ArgumentError("experiment: SVM C must be positive");
  for (int k : features) {
    if (k < 1) throw ArgumentError("experiment: feature counts must be at least 1");
    if (k > kMaxQubits) throw ArgumentError("experiment: feature count exceeds the qubit cap");
    for (KernelId id : kernels) {
      if (k < min_features(id)) {
        throw ArgumentError("experiment: " + to_string(id) + " needs at least " + std::to_string(min_features(id)) +
                            " features");
      }
    }
  }
  const int max_k = *std::max_element(features.begin(), features.end());
  if (static_cast<std::size_t>(max_k) > 2 * train_per_class - 1) {
    throw ArgumentError("experiment: more features than the training split supports");
  }
}

json to_json(const ExperimentConfig& c) {
  json kernels = json::array();
  for (KernelId k : c.kernels) kernels.push_back(to_string(k));
  json dataset;
  if (c.directory) dataset = {{"directory", *c.directory}};
  else dataset = {{"synthetic", to_json(c.synth)}};
  json out{{"dataset", dataset},
           {"preprocess", {{"downscale_factor", c.downscale_factor}, {"binarize_threshold", optional_json(c.binarize_threshold)}}},
           {"features", c.features},
           {"kernels", kernels},
           {"mode", c.mode.name()},
           {"shots", c.mode.is_exact() ? json(nullptr) : json(c.mode.shots)},
           {"svm", {{"C", c.svm.C}, {"tol", c.svm.tol}, {"max_passes", c.svm.max_passes}}},
           {"repeats", c.repeats},
           {"seed", c.seed},
           {"train_per_class", c.train_per_class},
           {"test_per_class", c.test_per_class},
           {"resplit_per_repeat", c.resplit_per_repeat}};
  if (c.concentration) {
    out["concentration"] = {{"kernel", to_string(c.concentration->kernel)},
                            {"qubits", c.concentration->qubits},
                            {"pairs", c.concentration->pairs}};
  } else {
    out["concentration"] = nullptr;
  }
  return out;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw ArgumentError("experiment config: expected a JSON object");
  static const std::set<std::string> known{"dataset", "preprocess", "features", "kernels", "mode", "shots", "svm",
                                           "repeats", "seed", "train_per_class", "test_per_class",
                                           "resplit_per_repeat", "concentration"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ArgumentError("experiment config: unknown key '" + item.key() + "'");
  try {
    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      if (d.contains("directory")) c.directory = d.at("directory").get<std::string>();
      if (d.contains("synthetic")) c.synth = synth_config_from_json(d.at("synthetic"));
    }
    if (j.contains("preprocess")) {
      const json& p = j.at("preprocess");
      if (p.contains("downscale_factor")) c.downscale_factor = p.at("downscale_factor").get<int>();
      c.binarize_threshold = optional_from<double>(p, "binarize_threshold");
    }
    if (j.contains("features")) c.features = j.at("features").get<std::vector<int>>();
    if (j.contains("kernels")) {
      c.kernels.clear();
      for (const auto& k : j.at("kernels")) c.kernels.push_back(parse_kernel_id(k.get<std::string>()));
    }
    if (j.contains("mode")) {
      const auto m = j.at("mode").get<std::string>();
      if (m == "exact") c.mode = EstimatorMode::exact();
      else if (m == "shots") c.mode = EstimatorMode::with_shots(optional_from<std::uint64_t>(j, "shots").value_or(kDefaultShots));
      else throw ArgumentError("experiment config: mode must be 'exact' or 'shots'");
    }
    if (j.contains("svm")) {
      const json& s = j.at("svm");
      if (s.contains("C")) c.svm.C = s.at("C").get<double>();
      if (s.contains("tol")) c.svm.tol = s.at("tol").get<double>();
      if (s.contains("max_passes")) c.svm.max_passes = s.at("max_passes").get<int>();
    }
    if (j.contains("repeats")) c.repeats = j.at("repeats").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("train_per_class")) c.train_per_class = j.at("train_per_class").get<std::size_t>();
    if (j.contains("test_per_class")) c.test_per_class = j.at("test_per_class").get<std::size_t>();
    if (j.contains("resplit_per_repeat")) c.resplit_per_repeat = j.at("resplit_per_repeat").get<bool>();
    if (j.contains("concentration") && !j.at("concentration").is_null()) {
      const json& p = j.at("concentration");
      ConcentrationConfig cc;
      if (p.contains("kernel")) cc.kernel = parse_kernel_id(p.at("kernel").get<std::string>());
      if (p.contains("qubits")) cc.qubits = p.at("qubits").get<std::vector<int>>();
      if (p.contains("pairs")) cc.pairs = p.at("pairs").get<int>();
      c.concentration = cc;
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("experiment config: ") + e.what());
  }
  return c;
}

json to_json(const RunReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"kernel", to_string(c.kernel)},
                     {"features", c.features},
                     {"repeat", c.repeat},
                     {"mode", mode_json(c.mode)},
                     {"seed", c.seed},
                     {"gram", {{"gamma", optional_json(c.gamma)},
                               {"train_min_eigenvalue", c.train_min_eigenvalue},
                               {"psd_clipped", c.psd_clipped}}},
                     {"svm", {{"support_vectors", c.support_vectors},
                              {"bias", c.bias},
                              {"converged", c.converged},
                              {"sweeps", c.sweeps}}},
                     {"depth", {{"gates", optional_json(c.gate_count)},
                                {"logical", optional_json(c.logical_depth)},
                                {"decomposed", optional_json(c.decomposed_depth)}}},
                     {"baseline_f1", c.baseline_f1},
                     {"eval", to_json(c.eval)}});
  }
  json aggregates = json::array();
  for (const auto& a : r.aggregates) {
    aggregates.push_back({{"kernel", to_string(a.kernel)},
                          {"features", a.features},
                          {"f1_min", a.f1_min},
                          {"f1_mean", a.f1_mean},
                          {"f1_max", a.f1_max},
                          {"auc_min", a.auc_min},
                          {"auc_mean", a.auc_mean},
                          {"auc_max", a.auc_max}});
  }
  json concentration = nullptr;
  if (r.concentration_kernel) {
    json rows = json::array();
    for (const auto& row : r.concentration) {
      rows.push_back({{"n_qubits", row.n_qubits}, {"mean", row.mean}, {"variance", row.variance}});
    }
    concentration = {{"kernel", to_string(*r.concentration_kernel)}, {"rows", rows}};
  }
  return {{"config", r.config},
          {"train_size", r.train_size},
          {"test_size", r.test_size},
          {"pca", {{"cr", r.pca.cr}, {"ccr", r.pca.ccr}}},
          {"cells", cells},
          {"aggregates", aggregates},
          {"concentration", concentration}};
}

RunReport run_report_from_json(const json& j) {
  RunReport r;
  r.config = j.at("config");
  r.train_size = j.at("train_size").get<std::size_t>();
  r.test_size = j.at("test_size").get<std::size_t>();
  r.pca.cr = j.at("pca").at("cr").get<std::vector<double>>();
  r.pca.ccr = j.at("pca").at("ccr").get<std::vector<double>>();
  for (const auto& c : j.at("cells")) {
    CellResult cell;
    cell.kernel = parse_kernel_id(c.at("kernel").get<std::string>());
    cell.features = c.at("features").get<int>();
    cell.repeat = c.at("repeat").get<int>();
    cell.mode = mode_from_json(c.at("mode"));
    cell.seed = c.at("seed").get<std::uint64_t>();
    const json& g = c.at("gram");
    cell.gamma = optional_from<double>(g, "gamma");
    cell.train_min_eigenvalue = g.at("train_min_eigenvalue").get<double>();
    cell.psd_clipped = g.at("psd_clipped").get<bool>();
    const json& s = c.at("svm");
    cell.support_vectors = s.at("support_vectors").get<std::size_t>();
    cell.bias = s.at("bias").get<double>();
    cell.converged = s.at("converged").get<bool>();
    cell.sweeps = s.at("sweeps").get<int>();
    const json& d = c.at("depth");
    cell.gate_count = optional_from<std::size_t>(d, "gates");
    cell.logical_depth = optional_from<int>(d, "logical");
    cell.decomposed_depth = optional_from<int>(d, "decomposed");
    cell.baseline_f1 = c.at("baseline_f1").get<double>();
    cell.eval = eval_report_from_json(c.at("eval"));
    r.cells.push_back(std::move(cell));
  }
  for (const auto& a : j.at("aggregates")) {
    r.aggregates.push_back({parse_kernel_id(a.at("kernel").get<std::string>()), a.at("features").get<int>(),
                            a.at("f1_min").get<double>(), a.at("f1_mean").get<double>(), a.at("f1_max").get<double>(),
                            a.at("auc_min").get<double>(), a.at("auc_mean").get<double>(),
                            a.at("auc_max").get<double>()});
  }
  const json& conc = j.at("concentration");
  if (!conc.is_null()) {
    r.concentration_kernel = parse_kernel_id(conc.at("kernel").get<std::string>());
    for (const auto& row : conc.at("rows")) {
      r.concentration.push_back({row.at("n_qubits").get<int>(), row.at("mean").get<double>(),
                                 row.at("variance").get<double>()});
    }
  }
  return r;
}

FeatureStage project_feature_stage(const PcaModel& pca_fit_on_train, const std::vector<std::vector<double>>& train,
                                   const std::vector<std::vector<double>>& test, std::size_t k) {
  FeatureStage stage;
  stage.pca = pca_fit_on_train.truncated(k);
  const auto train_scores = pca_transform_all(stage.pca, train);
  const auto test_scores = pca_transform_all(stage.pca, test);
  stage.scaler = fit_scaler(train_scores);
  stage.train_angles = scale_all(stage.scaler, train_scores);
  stage.test_angles = scale_all(stage.scaler, test_scores);
  return stage;
}

FeatureStage fit_feature_stage(const std::vector<std::vector<double>>& train,
                               const std::vector<std::vector<double>>& test, std::size_t k) {
  return project_feature_stage(pca_fit(train, k), train, test, k);
}

LabeledDataset preprocess(const LabeledDataset& dataset, int downscale_factor, std::optional<double> binarize_threshold) {
  LabeledDataset out = dataset;
  for (auto& s : out.samples) {
    if (downscale_factor > 1) s.image = downscale_box(s.image, downscale_factor);
    if (binarize_threshold) s.image = binarize(s.image, *binarize_threshold);
  }
  return out;
}

LabeledDataset load_experiment_dataset(const ExperimentConfig& config) {
  LabeledDataset raw = config.directory ? load_dataset(*config.directory)
                                        : synth_generate(config.synth, derive_seed(config.seed, {kStreamData}));
  return preprocess(raw, config.downscale_factor, config.binarize_threshold);
}

std::vector<CellAggregate> aggregate_cells(const std::vector<CellResult>& cells) {
  std::vector<CellAggregate> out;
  for (const auto& c : cells) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const CellAggregate& a) { return a.kernel == c.kernel && a.features == c.features; });
    if (it != out.end()) continue;
    CellAggregate a{c.kernel, c.features, INFINITY, 0.0, -INFINITY, INFINITY, 0.0, -INFINITY};
    std::size_t n = 0;
    for (const auto& d : cells) {
      if (d.kernel != c.kernel || d.features != c.features) continue;
      a.f1_min = std::min(a.f1_min, d.eval.f1);
      a.f1_max = std::max(a.f1_max, d.eval.f1);
      a.f1_mean += d.eval.f1;
      a.auc_min = std::min(a.auc_min, d.eval.auc);
      a.auc_max = std::max(a.auc_max, d.eval.auc);
      a.auc_mean += d.eval.auc;
      ++n;
    }
    // Clamp so identical repeats report min == mean == max exactly.
    a.f1_mean = std::clamp(a.f1_mean / static_cast<double>(n), a.f1_min, a.f1_max);
    a.auc_mean = std::clamp(a.auc_mean / static_cast<double>(n), a.auc_min, a.auc_max);
    out.push_back(a);
  }
  return out;
}

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const LabeledDataset dataset = load_experiment_dataset(config);
  const int max_k = *std::max_element(config.features.begin(), config.features.end());

  RunReport report;
  report.config = to_json(config);
  for (int r = 0; r < config.repeats; ++r) {
    const std::uint64_t split_seed = config.resplit_per_repeat
                                         ? derive_seed(config.seed, {kStreamSplit, static_cast<std::uint64_t>(r)})
                                         : derive_seed(config.seed, {kStreamSplit});
    const auto [train, test] = stratified_split(dataset, config.train_per_class, config.test_per_class, split_seed);
    const auto train_x = train.flattened();
    const auto test_x = test.flattened();
    const auto train_y = train.labels();
    const auto test_y = test.labels();
    const PcaModel pca = pca_fit(train_x, static_cast<std::size_t>(max_k));
    if (r == 0) {
      report.train_size = train.size();
      report.test_size = test.size();
      report.pca = contribution_ratios(pca);
    }

    for (int k : config.features) {
      const FeatureStage stage = project_feature_stage(pca, train_x, test_x, static_cast<std::size_t>(k));
      for (KernelId kernel : config.kernels) {
        const auto start = std::chrono::steady_clock::now();
        CellResult cell;
        cell.kernel = kernel;
        cell.features = k;
        cell.repeat = r;
        cell.mode = is_quantum(kernel) ? config.mode : EstimatorMode::exact();
        cell.seed = derive_seed(config.seed, {kStreamGram, kernel_code(kernel), static_cast<std::uint64_t>(k),
                                              static_cast<std::uint64_t>(r)});
        GramOptions opts{cell.mode, cell.seed, std::nullopt};
        if (kernel == KernelId::RBF) {
          cell.gamma = default_gamma(stage.train_angles);
          opts.gamma = cell.gamma;
        }
        GramMatrix train_gram = gram(kernel, stage.train_angles, stage.train_angles, opts);
        opts.seed = derive_seed(cell.seed, {1});
        const GramMatrix test_gram = gram(kernel, stage.test_angles, stage.train_angles, opts);
        cell.train_min_eigenvalue = train_gram.min_eigenvalue();
        if (!cell.mode.is_exact()) {
          train_gram = psd_clip(train_gram);
          cell.psd_clipped = true;
        }

        SvmParams svm = config.svm;
        svm.seed = derive_seed(config.seed, {kStreamSvm, kernel_code(kernel), static_cast<std::uint64_t>(k)});
        const SvmModel model = svm_train_smo(train_gram, train_y, svm);
        cell.support_vectors = model.support_indices.size();
        cell.bias = model.bias;
        cell.converged = model.converged;
        cell.sweeps = model.sweeps;
        cell.eval = evaluate(svm_decision_all(model, test_gram), test_y);
        cell.baseline_f1 = all_positive_f1(test_y);

        if (is_quantum(kernel)) {
          const Circuit circuit = build_feature_map(kernel, FeatureVector(static_cast<std::size_t>(k), 0.0));
          cell.gate_count = circuit.size();
          cell.logical_depth = logical_depth(circuit);
          cell.decomposed_depth = decomposed_depth(circuit);
        }
        report.cells.push_back(std::move(cell));
        report.cell_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      }
    }
  }
  report.aggregates = aggregate_cells(report.cells);
  if (config.concentration) {
    report.concentration_kernel = config.concentration->kernel;
    report.concentration = concentration_probe(config.concentration->kernel, config.concentration->qubits,
                                               config.concentration->pairs, derive_seed(config.seed, {4}));
  }
  return report;
}

std::vector<DepthRow> depth_table(const std::vector<KernelId>& kernels, const std::vector<int>& features) {
  std::vector<DepthRow> rows;
  for (KernelId kernel : kernels) {
    if (!is_quantum(kernel)) continue;
    for (int k : features) {
      const Circuit c = build_feature_map(kernel, FeatureVector(static_cast<std::size_t>(k), 0.0));
      rows.push_back({kernel, k, c.size(), logical_depth(c), decomposed_depth(c)});
    }
  }
  return rows;
}

void write_depth_csv(std::ostream& os, const std::vector<DepthRow>& rows) {
  os << "kernel,features,gates,logical_depth,decomposed_depth\n";
  for (const auto& r : rows) {
    os << to_string(r.kernel) << ',' << r.features << ',' << r.gates << ',' << r.logical_depth << ','
       << r.decomposed_depth << '\n';
  }
}

void write_concentration_csv(std::ostream& os, KernelId kernel, const std::vector<ConcentrationRow>& rows) {
  os << "kernel,n_qubits,mean,variance\n" << std::setprecision(17);
  for (const auto& r : rows) os << to_string(kernel) << ',' << r.n_qubits << ',' << r.mean << ',' << r.variance << '\n';
}

std::vector<std::string> emit_report(const RunReport& report, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::string> written;
  auto record = [&](const fs::path& p) { written.push_back(p.string()); };

  {
    auto os = open_out(dir / "report.json");
    os << to_json(report).dump(2) << '\n';
    record(dir / "report.json");
  }
  {
    json timings = json::array();
    for (std::size_t i = 0; i < report.cells.size() && i < report.cell_seconds.size(); ++i) {
      const auto& c = report.cells[i];
      timings.push_back({{"kernel", to_string(c.kernel)},
                         {"features", c.features},
                         {"repeat", c.repeat},
                         {"seconds", report.cell_seconds[i]}});
    }
    auto os = open_out(dir / "timings.json");
    os << json{{"cells", timings}}.dump(2) << '\n';
    record(dir / "timings.json");
  }
  if (!report.cells.empty()) {
    {
      auto os = open_out(dir / "f1_vs_features.csv");
      os << "kernel,features,f1_min,f1_mean,f1_max\n" << std::setprecision(10);
      for (const auto& a : report.aggregates) {
        os << to_string(a.kernel) << ',' << a.features << ',' << a.f1_min << ',' << a.f1_mean << ',' << a.f1_max << '\n';
      }
      record(dir / "f1_vs_features.csv");
    }
    for (const auto& c : report.cells) {
      std::string name = "roc_" + to_string(c.kernel) + "_" + std::to_string(c.features);
      if (c.repeat > 0) name += "_r" + std::to_string(c.repeat);
      auto os = open_out(dir / (name + ".csv"));
      write_roc_csv(os, c.eval.roc_points);
      record(dir / (name + ".csv"));
    }
    {
      std::vector<DepthRow> rows;
      for (const auto& a : report.aggregates) {
        const auto& c = *std::find_if(report.cells.begin(), report.cells.end(), [&](const CellResult& x) {
          return x.kernel == a.kernel && x.features == a.features;
        });
        if (c.logical_depth) rows.push_back({c.kernel, c.features, *c.gate_count, *c.logical_depth, *c.decomposed_depth});
      }
      auto os = open_out(dir / "depth_report.csv");
      write_depth_csv(os, rows);
      record(dir / "depth_report.csv");
    }
  }
  if (report.concentration_kernel) {
    auto os = open_out(dir / "concentration.csv");
    write_concentration_csv(os, *report.concentration_kernel, report.concentration);
    record(dir / "concentration.csv");
  }
  return written;
}

}  // namespace qksvm
