#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qksvm {

// Row-major grayscale image with intensities in [0, 1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0);
  GrayImage(int w, int h, std::vector<double> px);

  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const noexcept { return pixels.size(); }
  bool operator==(const GrayImage&) const = default;
};

// Binary (P5) or ASCII (P2) graymap, maxval up to 65535.
GrayImage parse_pgm(const std::vector<std::uint8_t>& bytes);
// Writes P5; maxval 255 stores one byte per pixel, larger maxval two
// big-endian bytes.
std::vector<std::uint8_t> encode_pgm(const GrayImage& image, int maxval = 255);

GrayImage load_pgm(const std::string& path);
void save_pgm(const GrayImage& image, const std::string& path, int maxval = 255);

// Output is ceil(w/factor) x ceil(h/factor); edge blocks average the pixels
// they actually cover.
GrayImage downscale_box(const GrayImage& image, int factor);
GrayImage binarize(const GrayImage& image, double threshold);
std::vector<double> flatten(const GrayImage& image);

}  // namespace qksvm
