#include "qksvm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "qksvm/errors.hpp"
#include "qksvm/experiment.hpp"
#include "qksvm/rng.hpp"

namespace qksvm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out_dir;
};

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), e.byte);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
}

ExperimentConfig load_config(const GlobalOptions& g, bool seed_given) {
  ExperimentConfig c = g.config_path.empty() ? ExperimentConfig{} : experiment_config_from_json(read_json_file(g.config_path));
  if (seed_given || g.config_path.empty()) c.seed = g.seed;
  return c;
}

std::vector<int> read_labels(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  std::string line;
  std::getline(is, line);
  if (line != "label") throw ParseError(path + ": expected 'label' header", 0);
  std::vector<int> labels;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line == "1" || line == "+1") labels.push_back(1);
    else if (line == "-1") labels.push_back(-1);
    else throw ParseError(path + ": label must be 1 or -1, got '" + line + "'", labels.size() + 1);
  }
  return labels;
}

std::string labels_csv(const std::vector<int>& labels) {
  std::ostringstream os;
  os << "label\n";
  for (int y : labels) os << y << '\n';
  return os.str();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const int lo = std::stoi(item.substr(0, dash)), hi = std::stoi(item.substr(dash + 1));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoi(item));
      }
    } catch (const std::logic_error&) {
      throw ArgumentError("bad integer list '" + text + "'");
    }
  }
  if (out.empty()) throw ArgumentError("empty integer list");
  return out;
}

std::vector<KernelId> parse_kernel_list(const std::string& text) {
  std::vector<KernelId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_kernel_id(item));
  if (out.empty()) throw ArgumentError("empty kernel list");
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum-kernel SVM anomaly detection on small image datasets", "qksvm"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed for every stochastic stage");
  app.add_option("--config", g.config_path, "Experiment configuration JSON");
  app.add_option("--out", g.out_dir, "Output directory");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset (normal/ and anomaly/ PGMs + manifest.json)");
  int gen_normal = -1, gen_anomaly = -1;
  gen->add_option("--normal", gen_normal, "Number of normal samples");
  gen->add_option("--anomaly", gen_anomaly, "Number of anomaly samples");

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "Downscale and optionally binarize a dataset directory");
  std::string prep_in;
  int prep_factor = 10;
  std::optional<double> prep_threshold;
  prep->add_option("--in", prep_in, "Input dataset directory")->required();
  prep->add_option("--factor", prep_factor, "Box-filter downscale factor")->check(CLI::PositiveNumber);
  prep->add_option("--binarize", prep_threshold, "Binarization threshold in [0,1]");

  // pca-report
  auto* pca_cmd = app.add_subcommand("pca-report", "Contribution ratio table of the leading principal components");
  std::string pca_in;
  std::size_t pca_k = 10;
  pca_cmd->add_option("--in", pca_in, "Dataset directory (synthetic default when omitted)");
  pca_cmd->add_option("--k", pca_k, "Number of components");

  // kernel
  auto* kern = app.add_subcommand("kernel", "Compute train and test Gram matrices to CSV");
  std::string kern_name = "QK9", kern_mode = "exact", kern_in;
  std::uint64_t kern_shots = kDefaultShots;
  std::size_t kern_features = 4;
  kern->add_option("--kernel", kern_name, "QK0..QK10 or RBF");
  kern->add_option("--mode", kern_mode, "exact or shots")->check(CLI::IsMember({"exact", "shots"}));
  kern->add_option("--shots", kern_shots, "Shots per entry in shot mode");
  kern->add_option("--features", kern_features, "Number of principal components");
  kern->add_option("--in", kern_in, "Dataset directory (synthetic default when omitted)");

  // train
  auto* train = app.add_subcommand("train", "Train an SVM on a precomputed train Gram matrix");
  std::string train_gram, train_labels;
  SvmParams svm_params;
  train->add_option("--gram", train_gram, "Train Gram CSV")->required();
  train->add_option("--labels", train_labels, "Train labels CSV")->required();
  train->add_option("--C", svm_params.C, "Box constraint");
  train->add_option("--tol", svm_params.tol, "KKT tolerance");
  train->add_option("--max-passes", svm_params.max_passes, "Maximum SMO sweeps");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a test Gram matrix with a trained model");
  std::string eval_model, eval_gram, eval_labels;
  eval->add_option("--model", eval_model, "model.json from train")->required();
  eval->add_option("--gram", eval_gram, "Test-by-train Gram CSV")->required();
  eval->add_option("--labels", eval_labels, "Test labels CSV")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run the kernel x feature-count sweep");

  // depth-report
  auto* depth = app.add_subcommand("depth-report", "Logical and decomposed circuit depths");
  std::string depth_kernels = "QK0,QK1,QK2,QK3,QK4,QK5,QK6,QK7,QK8,QK9,QK10", depth_features = "4";
  depth->add_option("--kernels", depth_kernels, "Comma-separated kernel list");
  depth->add_option("--features", depth_features, "Feature counts, e.g. 4 or 2-8");

  // concentration-probe
  auto* probe = app.add_subcommand("concentration-probe", "Mean and variance of random-pair kernel values");
  std::string probe_kernel = "QK9", probe_qubits = "2-8";
  int probe_pairs = 500;
  probe->add_option("--kernel", probe_kernel, "Quantum kernel");
  probe->add_option("--qubits", probe_qubits, "Qubit counts, e.g. 2-8");
  probe->add_option("--pairs", probe_pairs, "Random pairs per qubit count");

  std::vector<std::string> args(argv + 1, argv + argc);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const bool seed_given = seed_opt->count() > 0;
  try {
    const fs::path out_dir = g.out_dir;
    if (gen->parsed()) {
      ExperimentConfig c = load_config(g, seed_given);
      if (gen_normal >= 0) c.synth.normal_count = gen_normal;
      if (gen_anomaly >= 0) c.synth.anomaly_count = gen_anomaly;
      const fs::path dir = g.out_dir.empty() ? fs::path("synthetic_data") : out_dir;
      const LabeledDataset ds = synth_generate(c.synth, c.seed);
      save_dataset(ds, dir.string(), json{{"synthetic", to_json(c.synth)}, {"seed", c.seed}});
      out << "wrote " << ds.size() << " images to " << dir.string() << '\n';
    } else if (prep->parsed()) {
      if (g.out_dir.empty()) throw ArgumentError("preprocess needs --out");
      const LabeledDataset ds = preprocess(load_dataset(prep_in), prep_factor, prep_threshold);
      save_dataset(ds, g.out_dir,
                   json{{"source", prep_in}, {"downscale_factor", prep_factor},
                        {"binarize_threshold", prep_threshold ? json(*prep_threshold) : json(nullptr)}});
      out << "wrote " << ds.size() << " images to " << g.out_dir << '\n';
    } else if (pca_cmd->parsed()) {
      ExperimentConfig c = load_config(g, seed_given);
      if (!pca_in.empty()) c.directory = pca_in;
      const LabeledDataset ds = load_experiment_dataset(c);
      const PcaModel model = pca_fit(ds.flattened(), pca_k);
      const ContributionRatios ratios = contribution_ratios(model);
      std::ostringstream table;
      table << "PC,CR,CCR\n" << std::fixed << std::setprecision(4);
      for (std::size_t i = 0; i < ratios.cr.size(); ++i) {
        table << (i + 1) << ',' << ratios.cr[i] << ',' << ratios.ccr[i] << '\n';
      }
      out << table.str();
      if (!g.out_dir.empty()) write_text(out_dir / "pca_report.csv", table.str());
    } else if (kern->parsed()) {
      const KernelId kernel = parse_kernel_id(kern_name);
      const EstimatorMode mode = kern_mode == "exact" ? EstimatorMode::exact() : EstimatorMode::with_shots(kern_shots);
      if (kernel == KernelId::RBF && !mode.is_exact()) throw WrongFamilyError("RBF has no shot mode");
      if (!mode.is_exact() && kern_shots == 0) throw ArgumentError("shots must be at least 1");
      ExperimentConfig c = load_config(g, seed_given);
      if (!kern_in.empty()) c.directory = kern_in;
      const LabeledDataset ds = load_experiment_dataset(c);
      const auto [tr, te] = stratified_split(ds, c.train_per_class, c.test_per_class, derive_seed(c.seed, {1}));
      const FeatureStage stage = fit_feature_stage(tr.flattened(), te.flattened(), kern_features);
      GramOptions opts{mode, derive_seed(c.seed, {2}), std::nullopt};
      if (kernel == KernelId::RBF) opts.gamma = default_gamma(stage.train_angles);
      GramMatrix g_train = gram(kernel, stage.train_angles, stage.train_angles, opts);
      opts.seed = derive_seed(opts.seed, {1});
      const GramMatrix g_test = gram(kernel, stage.test_angles, stage.train_angles, opts);
      if (!mode.is_exact()) g_train = psd_clip(g_train);
      const fs::path dir = g.out_dir.empty() ? fs::path(".") : out_dir;
      fs::create_directories(dir);
      g_train.save_csv((dir / "gram_train.csv").string());
      g_test.save_csv((dir / "gram_test.csv").string());
      write_text(dir / "labels_train.csv", labels_csv(tr.labels()));
      write_text(dir / "labels_test.csv", labels_csv(te.labels()));
      out << "wrote " << g_train.rows() << "x" << g_train.cols() << " train and " << g_test.rows() << "x"
          << g_test.cols() << " test Gram matrices to " << dir.string() << '\n';
    } else if (train->parsed()) {
      const GramMatrix gm = GramMatrix::load_csv(train_gram);
      svm_params.seed = g.seed;
      const SvmModel model = svm_train_smo(gm, read_labels(train_labels), svm_params);
      const fs::path dir = g.out_dir.empty() ? fs::path(".") : out_dir;
      write_text(dir / "model.json", to_json(model).dump(2) + "\n");
      out << "trained on " << model.size() << " samples, " << model.support_indices.size() << " support vectors, "
          << (model.converged ? "converged" : "not converged") << " after " << model.sweeps << " sweeps\n";
    } else if (eval->parsed()) {
      const SvmModel model = svm_model_from_json(read_json_file(eval_model));
      const GramMatrix gm = GramMatrix::load_csv(eval_gram);
      const EvalReport report = evaluate(svm_decision_all(model, gm), read_labels(eval_labels));
      const fs::path dir = g.out_dir.empty() ? fs::path(".") : out_dir;
      write_text(dir / "eval.json", to_json(report).dump(2) + "\n");
      std::ostringstream roc;
      write_roc_csv(roc, report.roc_points);
      write_text(dir / "roc.csv", roc.str());
      out << std::setprecision(4) << "F1 " << report.f1 << "  AUC " << report.auc << "  precision " << report.precision
          << "  recall " << report.recall << '\n';
    } else if (exp->parsed()) {
      const ExperimentConfig c = load_config(g, seed_given);
      const RunReport report = run_experiment(c);
      const std::string dir = g.out_dir.empty() ? "report" : g.out_dir;
      const auto files = emit_report(report, dir);
      out << "wrote " << files.size() << " files to " << dir << " (" << report.cells.size() << " cells)\n";
    } else if (depth->parsed()) {
      const auto rows = depth_table(parse_kernel_list(depth_kernels), parse_int_list(depth_features));
      std::ostringstream csv;
      write_depth_csv(csv, rows);
      out << csv.str();
      if (!g.out_dir.empty()) write_text(out_dir / "depth_report.csv", csv.str());
    } else if (probe->parsed()) {
      const KernelId kernel = parse_kernel_id(probe_kernel);
      const auto rows = concentration_probe(kernel, parse_int_list(probe_qubits), probe_pairs, g.seed);
      std::ostringstream csv;
      write_concentration_csv(csv, kernel, rows);
      out << csv.str();
      if (!g.out_dir.empty()) write_text(out_dir / "concentration.csv", csv.str());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace qksvm
