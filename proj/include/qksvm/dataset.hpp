#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qksvm/image.hpp"

namespace qksvm {

inline constexpr int kNormal = -1;
inline constexpr int kAnomaly = +1;

struct Sample {
  GrayImage image;
  int label = kNormal;
  std::string name;
};

struct LabeledDataset {
  std::vector<Sample> samples;
  std::string provenance;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t count(int label) const;
  std::vector<int> labels() const;
  std::vector<std::vector<double>> flattened() const;
};

// Parameters of the synthetic apple images. Lengths are in pixels of the
// generated image; levels are intensities in [0, 1].
struct SynthConfig {
  int width = 403;
  int height = 302;
  double radius_fraction = 0.42;  // disk radius / min(width, height)
  double center_jitter = 0.5;
  double radius_jitter = 0.002;    // relative
  double apple_level = 0.85;
  double radial_falloff = 0.25;
  double background = 0.08;
  double noise_sigma = 0.01;
  // Crack centres are drawn from a centred square covering this fraction of
  // the image area.
  double crack_region_fraction = 0.03;
  double crack_length = 100.0;
  double crack_width = 12.0;
  double crack_contrast = 0.7;
  double crack_angle_spread = 0.2;  // radians either side of horizontal
  double browning_fraction = 0.3;
  double browning_radius_fraction = 0.3;  // of the disk radius
  double browning_contrast = 0.15;
  int normal_count = 33;
  int anomaly_count = 33;
};

nlohmann::json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& j);

LabeledDataset synth_generate(const SynthConfig& config, std::uint64_t seed);

// Per-class random selection without overlap; within each split normals come
// before anomalies.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& dataset, std::size_t train_per_class,
                                                           std::size_t test_per_class, std::uint64_t seed);

// <root>/normal/*.pgm and <root>/anomaly/*.pgm, read in filename order.
LabeledDataset load_dataset(const std::string& root);
// Writes the directory layout plus manifest.json when `manifest` is not null.
void save_dataset(const LabeledDataset& dataset, const std::string& root, const nlohmann::json& manifest = nullptr);

}  // namespace qksvm
