#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qksvm/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "qksvm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = qksvm::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "qksvm_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    std::ofstream(d / "c.json") << R"({
      "dataset": {"synthetic": {"width": 48, "height": 36, "crack_length": 16, "crack_width": 4,
                                "normal_count": 10, "anomaly_count": 10}},
      "train_per_class": 6, "test_per_class": 3,
      "features": [2, 3], "kernels": ["QK1", "RBF"], "seed": 3
    })";
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  const auto r = run({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({"kernel", "--mode", "sometimes"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("RBF has no shot mode") {
  const auto r = run({"kernel", "--kernel", "RBF", "--mode", "shots"});
  CHECK(r.code == 2);
  CHECK(r.err.find("RBF") != std::string::npos);
  CHECK(run({"kernel", "--kernel", "QK99"}).code == 2);
}

TEST_CASE("experiment happy path") {
  const auto dir = workdir();
  const auto r = run({"experiment", "--config", (dir / "c.json").string(), "--out", (dir / "r").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "r" / "report.json"));
  CHECK(fs::exists(dir / "r" / "f1_vs_features.csv"));
  CHECK(fs::exists(dir / "r" / "roc_QK1_3.csv"));
  const auto report = nlohmann::json::parse(slurp(dir / "r" / "report.json"));
  CHECK(report.at("cells").size() == 4);

  // --seed overrides the config file.
  const auto r2 = run({"--seed", "99", "experiment", "--config", (dir / "c.json").string(), "--out", (dir / "r2").string()});
  REQUIRE(r2.code == 0);
  CHECK(slurp(dir / "r2" / "report.json") != slurp(dir / "r" / "report.json"));

  CHECK(run({"experiment", "--config", (dir / "missing.json").string()}).code == 2);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK(run({"experiment", "--config", (dir / "bad.json").string()}).code == 2);
  std::ofstream(dir / "typo.json") << R"({"synth": {}})";
  CHECK(run({"experiment", "--config", (dir / "typo.json").string()}).code == 2);
}

TEST_CASE("gen-data, preprocess and pca-report") {
  const auto dir = workdir();
  const auto data = dir / "data";
  REQUIRE(run({"gen-data", "--config", (dir / "c.json").string(), "--normal", "4", "--anomaly", "5", "--out",
               data.string()})
              .code == 0);
  CHECK(fs::exists(data / "manifest.json"));
  std::size_t anomalies = 0;
  for (const auto& e : fs::directory_iterator(data / "anomaly")) anomalies += e.path().extension() == ".pgm";
  CHECK(anomalies == 5);

  const auto small = dir / "small";
  REQUIRE(run({"preprocess", "--in", data.string(), "--factor", "2", "--binarize", "0.5", "--out", small.string()})
              .code == 0);
  CHECK(run({"preprocess", "--in", (dir / "nowhere").string(), "--out", small.string()}).code == 2);
  CHECK(run({"preprocess"}).code == 1);

  const auto r = run({"pca-report", "--in", data.string(), "--k", "5", "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "PC,CR,CCR");
  double prev = 0.0;
  int rows = 0;
  while (std::getline(lines, line)) {
    const double ccr = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(ccr >= prev);
    CHECK(ccr <= 1.0 + 1e-10);
    prev = ccr;
    ++rows;
  }
  CHECK(rows == 5);
  CHECK(fs::exists(dir / "pca_report.csv"));
}

TEST_CASE("pca-report on the default synthetic data has a nondecreasing CCR") {
  const auto r = run({"pca-report", "--k", "10"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  double prev = 0.0;
  while (std::getline(lines, line)) {
    const double ccr = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(ccr >= prev);
    prev = ccr;
  }
}

TEST_CASE("kernel, train, evaluate flow") {
  const auto dir = workdir();
  const auto flow = dir / "flow";
  REQUIRE(run({"kernel", "--config", (dir / "c.json").string(), "--kernel", "QK1", "--features", "3", "--out",
               flow.string()})
              .code == 0);
  CHECK(slurp(flow / "gram_train.csv").rfind("# kernel=QK1,mode=exact", 0) == 0);
  REQUIRE(run({"train", "--gram", (flow / "gram_train.csv").string(), "--labels", (flow / "labels_train.csv").string(),
               "--C", "2", "--out", flow.string()})
              .code == 0);
  const auto model = nlohmann::json::parse(slurp(flow / "model.json"));
  CHECK(model.at("C") == 2.0);
  const auto r = run({"evaluate", "--model", (flow / "model.json").string(), "--gram", (flow / "gram_test.csv").string(),
                      "--labels", (flow / "labels_test.csv").string(), "--out", flow.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("AUC") != std::string::npos);
  CHECK(slurp(flow / "roc.csv").rfind("FPR,TPR\n", 0) == 0);
  CHECK(nlohmann::json::parse(slurp(flow / "eval.json")).contains("f1"));

  // Shot mode writes the shot count into the header.
  REQUIRE(run({"kernel", "--config", (dir / "c.json").string(), "--kernel", "QK2", "--mode", "shots", "--shots",
               "100", "--out", (dir / "shots").string()})
              .code == 0);
  CHECK(slurp(dir / "shots" / "gram_train.csv").find("shots=100") != std::string::npos);

  // Test Gram used as a train Gram is not square.
  CHECK(run({"train", "--gram", (flow / "gram_test.csv").string(), "--labels", (flow / "labels_test.csv").string(),
             "--out", flow.string()})
            .code == 2);
}

TEST_CASE("depth-report and concentration-probe") {
  const auto r = run({"depth-report", "--kernels", "QK9,QK10", "--features", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("QK9,4,") != std::string::npos);
  CHECK(r.out.find("QK10,4,") != std::string::npos);
  CHECK(run({"depth-report", "--features", "2-8"}).code == 0);
  CHECK(run({"depth-report", "--features", "8-2"}).code == 2);

  const auto p = run({"concentration-probe", "--kernel", "QK9", "--qubits", "2-3", "--pairs", "20"});
  REQUIRE(p.code == 0);
  CHECK(p.out.rfind("kernel,n_qubits,mean,variance\nQK9,2,", 0) == 0);
  CHECK(run({"concentration-probe", "--kernel", "RBF", "--qubits", "2"}).code == 2);
}
