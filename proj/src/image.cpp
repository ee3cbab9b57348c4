#include "qksvm/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "qksvm/errors.hpp"

namespace qksvm {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFUL) throw ParseError(std::string("PGM: ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= bytes_.size()) throw ParseError(std::string("PGM: truncated before ") + what, pos_);
      throw ParseError(std::string("PGM: expected ") + what, pos_);
    }
    return value;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage::GrayImage(int w, int h, double fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ArgumentError("image dimensions must be positive");
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

GrayImage::GrayImage(int w, int h, std::vector<double> px) : width(w), height(h), pixels(std::move(px)) {
  if (w <= 0 || h <= 0) throw ArgumentError("image dimensions must be positive");
  if (pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw ShapeError("pixel count does not match width x height");
  }
}

GrayImage parse_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2) throw ParseError("PGM: file too short for magic number", 0);
  if (bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("PGM: unsupported magic '" + std::string(bytes.begin(), bytes.begin() + 2) +
                         "' (only P2 and P5 grayscale)",
                     0);
  }
  const bool binary = bytes[1] == '5';
  HeaderReader reader(bytes);
  reader.advance(2);
  const std::size_t width_at = reader.pos();
  const unsigned long width = reader.read_uint("width");
  const unsigned long height = reader.read_uint("height");
  const unsigned long maxval = reader.read_uint("maxval");
  if (width == 0 || height == 0) throw ParseError("PGM: zero image dimension", width_at);
  if (maxval == 0 || maxval > 65535) throw ParseError("PGM: maxval must be in [1, 65535]", reader.pos());

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<double> px(count);
  const double denom = static_cast<double>(maxval);
  if (binary) {
    if (reader.pos() >= bytes.size() || !std::isspace(bytes[reader.pos()])) {
      throw ParseError("PGM: expected whitespace after maxval", reader.pos());
    }
    reader.advance(1);
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    const std::size_t start = reader.pos();
    if (bytes.size() - start < count * bpp) {
      throw ParseError("PGM: truncated payload, expected " + std::to_string(count * bpp) + " bytes",
                       bytes.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      unsigned v = bytes[start + i * bpp];
      if (bpp == 2) v = (v << 8) | bytes[start + i * 2 + 1];
      if (v > maxval) throw ParseError("PGM: sample exceeds maxval", start + i * bpp);
      px[i] = v / denom;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      reader.skip_space_and_comments();
      const std::size_t at = reader.pos();
      const unsigned long v = reader.read_uint("sample");
      if (v > maxval) throw ParseError("PGM: sample exceeds maxval", at);
      px[i] = static_cast<double>(v) / denom;
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(px));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image, int maxval) {
  if (maxval < 1 || maxval > 65535) throw ArgumentError("PGM maxval must be in [1, 65535]");
  const std::string header =
      "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n" + std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = maxval > 255;
  out.reserve(out.size() + image.size() * (wide ? 2 : 1));
  for (double p : image.pixels) {
    const auto v = static_cast<unsigned>(std::lround(std::clamp(p, 0.0, 1.0) * maxval));
    if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  return out;
}

GrayImage load_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return parse_pgm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.offset());
  }
}

void save_pgm(const GrayImage& image, const std::string& path, int maxval) {
  const auto bytes = encode_pgm(image, maxval);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path);
}

GrayImage downscale_box(const GrayImage& image, int factor) {
  if (factor < 1) throw ArgumentError("downscale factor must be at least 1");
  const int ow = (image.width + factor - 1) / factor;
  const int oh = (image.height + factor - 1) / factor;
  GrayImage out(ow, oh);
  for (int oy = 0; oy < oh; ++oy) {
    const int y1 = std::min(image.height, (oy + 1) * factor);
    for (int ox = 0; ox < ow; ++ox) {
      const int x1 = std::min(image.width, (ox + 1) * factor);
      double sum = 0.0;
      int n = 0;
      for (int y = oy * factor; y < y1; ++y)
        for (int x = ox * factor; x < x1; ++x, ++n) sum += image.at(x, y);
      out.at(ox, oy) = sum / n;
    }
  }
  return out;
}

GrayImage binarize(const GrayImage& image, double threshold) {
  GrayImage out = image;
  for (double& p : out.pixels) p = p >= threshold ? 1.0 : 0.0;
  return out;
}

std::vector<double> flatten(const GrayImage& image) { return image.pixels; }

}  // namespace qksvm
