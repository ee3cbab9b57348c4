#include "qksvm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "qksvm/errors.hpp"
#include "qksvm/rng.hpp"

namespace qksvm {
namespace fs = std::filesystem;

namespace {

double distance_to_segment(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double cx = ax + t * dx - px, cy = ay + t * dy - py;
  return std::sqrt(cx * cx + cy * cy);
}

GrayImage render_apple(const SynthConfig& c, bool anomaly, Rng& rng) {
  GrayImage img(c.width, c.height, c.background);
  const double cx = 0.5 * c.width + rng.uniform(-c.center_jitter, c.center_jitter);
  const double cy = 0.5 * c.height + rng.uniform(-c.center_jitter, c.center_jitter);
  const double radius =
      c.radius_fraction * std::min(c.width, c.height) * (1.0 + rng.uniform(-c.radius_jitter, c.radius_jitter));

  for (int y = 0; y < c.height; ++y) {
    for (int x = 0; x < c.width; ++x) {
      const double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
      if (r2 <= 1.0) img.at(x, y) = c.apple_level * (1.0 - c.radial_falloff * r2);
    }
  }

  // Both classes draw the browning decision so the RNG stream length does
  // not depend on the label.
  const bool browned = rng.uniform() < c.browning_fraction;
  const double br_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double br_dist = rng.uniform(0.2, 0.6) * radius;
  if (browned) {
    const double bx = cx + br_dist * std::cos(br_angle);
    const double by = cy + br_dist * std::sin(br_angle);
    const double sigma = c.browning_radius_fraction * radius;
    for (int y = 0; y < c.height; ++y) {
      for (int x = 0; x < c.width; ++x) {
        const double d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
        if (((x - cx) * (x - cx) + (y - cy) * (y - cy)) > radius * radius) continue;
        img.at(x, y) -= c.browning_contrast * std::exp(-d2 / (2.0 * sigma * sigma));
      }
    }
  }

  const double half_region = 0.5 * std::sqrt(c.crack_region_fraction * c.width * c.height);
  const double crack_x = cx + rng.uniform(-half_region, half_region);
  const double crack_y = cy + rng.uniform(-half_region, half_region);
  const double theta = rng.uniform(-c.crack_angle_spread, c.crack_angle_spread);
  if (anomaly && c.crack_contrast != 0.0) {
    const double hx = 0.5 * c.crack_length * std::cos(theta), hy = 0.5 * c.crack_length * std::sin(theta);
    const double ax = crack_x - hx, ay = crack_y - hy, bx = crack_x + hx, by = crack_y + hy;
    const double half_w = 0.5 * c.crack_width;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - half_w - 1)));
    const int x1 = std::min(c.width - 1, static_cast<int>(std::ceil(std::max(ax, bx) + half_w + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - half_w - 1)));
    const int y1 = std::min(c.height - 1, static_cast<int>(std::ceil(std::max(ay, by) + half_w + 1)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (distance_to_segment(x, y, ax, ay, bx, by) <= half_w) img.at(x, y) -= c.crack_contrast;
  }

  for (double& p : img.pixels) p = std::clamp(p + c.noise_sigma * rng.normal(), 0.0, 1.0);
  return img;
}

std::vector<fs::path> pgm_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

std::size_t LabeledDataset::count(int label) const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [label](const Sample& s) { return s.label == label; }));
}

std::vector<int> LabeledDataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

std::vector<std::vector<double>> LabeledDataset::flattened() const {
  std::vector<std::vector<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(flatten(s.image));
  return out;
}

nlohmann::json to_json(const SynthConfig& c) {
  return {{"width", c.width},
          {"height", c.height},
          {"radius_fraction", c.radius_fraction},
          {"center_jitter", c.center_jitter},
          {"radius_jitter", c.radius_jitter},
          {"apple_level", c.apple_level},
          {"radial_falloff", c.radial_falloff},
          {"background", c.background},
          {"noise_sigma", c.noise_sigma},
          {"crack_region_fraction", c.crack_region_fraction},
          {"crack_length", c.crack_length},
          {"crack_width", c.crack_width},
          {"crack_contrast", c.crack_contrast},
          {"crack_angle_spread", c.crack_angle_spread},
          {"browning_fraction", c.browning_fraction},
          {"browning_radius_fraction", c.browning_radius_fraction},
          {"browning_contrast", c.browning_contrast},
          {"normal_count", c.normal_count},
          {"anomaly_count", c.anomaly_count}};
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("width", c.width);
  read("height", c.height);
  read("radius_fraction", c.radius_fraction);
  read("center_jitter", c.center_jitter);
  read("radius_jitter", c.radius_jitter);
  read("apple_level", c.apple_level);
  read("radial_falloff", c.radial_falloff);
  read("background", c.background);
  read("noise_sigma", c.noise_sigma);
  read("crack_region_fraction", c.crack_region_fraction);
  read("crack_length", c.crack_length);
  read("crack_width", c.crack_width);
  read("crack_contrast", c.crack_contrast);
  read("crack_angle_spread", c.crack_angle_spread);
  read("browning_fraction", c.browning_fraction);
  read("browning_radius_fraction", c.browning_radius_fraction);
  read("browning_contrast", c.browning_contrast);
  read("normal_count", c.normal_count);
  read("anomaly_count", c.anomaly_count);
  return c;
}

LabeledDataset synth_generate(const SynthConfig& config, std::uint64_t seed) {
  if (config.normal_count < 1 || config.anomaly_count < 1) {
    throw ArgumentError("synth_generate: both class counts must be positive");
  }
  if (config.width < 1 || config.height < 1) throw ArgumentError("synth_generate: image size must be positive");
  LabeledDataset ds;
  ds.provenance = "synthetic:seed=" + std::to_string(seed);
  char name[32];
  for (int label : {kNormal, kAnomaly}) {
    const int count = label == kNormal ? config.normal_count : config.anomaly_count;
    for (int i = 0; i < count; ++i) {
      Rng rng(derive_seed(seed, {label == kNormal ? 0U : 1U, static_cast<std::uint64_t>(i)}));
      std::snprintf(name, sizeof name, "%s_%03d", label == kNormal ? "normal" : "anomaly", i);
      ds.samples.push_back({render_apple(config, label == kAnomaly, rng), label, name});
    }
  }
  return ds;
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& dataset, std::size_t train_per_class,
                                                           std::size_t test_per_class, std::uint64_t seed) {
  LabeledDataset train, test;
  train.provenance = test.provenance = dataset.provenance;
  for (int label : {kNormal, kAnomaly}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (dataset.samples[i].label == label) idx.push_back(i);
    if (idx.size() < train_per_class + test_per_class) {
      throw ArgumentError("stratified_split: class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                          " samples, need " + std::to_string(train_per_class + test_per_class));
    }
    Rng rng(derive_seed(seed, {label == kNormal ? 0U : 1U}));
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    for (std::size_t k = 0; k < train_per_class; ++k) train.samples.push_back(dataset.samples[idx[k]]);
    for (std::size_t k = 0; k < test_per_class; ++k) test.samples.push_back(dataset.samples[idx[train_per_class + k]]);
  }
  return {std::move(train), std::move(test)};
}

LabeledDataset load_dataset(const std::string& root) {
  const fs::path base(root);
  if (!fs::is_directory(base)) throw IoError("dataset directory not found: " + root);
  LabeledDataset ds;
  ds.provenance = root;
  for (auto [sub, label] : {std::pair{"normal", kNormal}, std::pair{"anomaly", kAnomaly}}) {
    for (const auto& file : pgm_files(base / sub)) {
      ds.samples.push_back({load_pgm(file.string()), label, file.stem().string()});
    }
  }
  if (ds.samples.empty()) throw IoError("no .pgm files under " + root + "/normal or " + root + "/anomaly");
  return ds;
}

void save_dataset(const LabeledDataset& dataset, const std::string& root, const nlohmann::json& manifest) {
  const fs::path base(root);
  std::error_code ec;
  for (const char* sub : {"normal", "anomaly"}) {
    fs::create_directories(base / sub, ec);
    if (ec) throw IoError("cannot create " + (base / sub).string() + ": " + ec.message());
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    const std::string stem = s.name.empty() ? "sample_" + std::to_string(i) : s.name;
    save_pgm(s.image, (base / (s.label == kAnomaly ? "anomaly" : "normal") / (stem + ".pgm")).string());
  }
  if (!manifest.is_null()) {
    std::ofstream os(base / "manifest.json");
    if (!os) throw IoError("cannot write " + (base / "manifest.json").string());
    os << manifest.dump(2) << '\n';
  }
}

}  // namespace qksvm
