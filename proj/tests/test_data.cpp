#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>

#include "qksvm/dataset.hpp"
#include "qksvm/errors.hpp"
#include "qksvm/image.hpp"
#include "qksvm/rng.hpp"

using namespace qksvm;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

GrayImage random_image(Rng& rng, int w, int h, int maxval = 255) {
  GrayImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<double>(rng.below(static_cast<std::uint64_t>(maxval) + 1)) / maxval;
  return img;
}

SynthConfig small_config() {
  SynthConfig c;
  c.width = 80;
  c.height = 60;
  c.crack_length = 12;
  c.crack_width = 2;
  c.normal_count = 10;
  c.anomaly_count = 10;
  return c;
}

std::size_t parse_offset(const std::string& text) {
  try {
    parse_pgm(bytes_of(text));
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected a parse error");
  return 0;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("parse_pgm ASCII example") {
  const auto img = parse_pgm(bytes_of("P2 2 2 255 0 255 128 64"));
  REQUIRE(img.width == 2);
  REQUIRE(img.height == 2);
  CHECK(img.pixels[0] == 0.0);
  CHECK(img.pixels[1] == 1.0);
  CHECK(img.pixels[2] == doctest::Approx(128.0 / 255.0));
  CHECK(img.pixels[3] == doctest::Approx(64.0 / 255.0));

  const auto commented = parse_pgm(bytes_of("P2\n# a comment\n2 1\n# another\n10\n0 10\n"));
  CHECK(commented.pixels == std::vector<double>{0.0, 1.0});
}

TEST_CASE("P5 round trip is bit-exact") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const int w = 1 + static_cast<int>(rng.below(20)), h = 1 + static_cast<int>(rng.below(20));
    const auto img = random_image(rng, w, h);
    const auto bytes = encode_pgm(img);
    const auto back = parse_pgm(bytes);
    CHECK(back == img);
    CHECK(encode_pgm(back) == bytes);
  }
  const auto wide = random_image(rng, 7, 5, 65535);
  CHECK(parse_pgm(encode_pgm(wide, 65535)) == wide);
}

TEST_CASE("parse_pgm rejects malformed input") {
  CHECK_THROWS_AS(parse_pgm(bytes_of("P3 1 1 255 0 0 0")), ParseError);
  CHECK(parse_offset("P3 1 1 255 0 0 0") == 0);
  CHECK_THROWS_AS(parse_pgm(bytes_of("P2 2 2 255 0 1 2")), ParseError);  // truncated payload
  CHECK_THROWS_AS(parse_pgm(bytes_of("P5 2 2 255\n\x01\x02")), ParseError);
  CHECK_THROWS_AS(parse_pgm(bytes_of("P2 1 1 10 11")), ParseError);       // sample above maxval
  CHECK_THROWS_AS(parse_pgm(bytes_of("P2 x 1 10 1")), ParseError);
  CHECK(parse_offset("P2 x 1 10 1") == 3);
  CHECK_THROWS_AS(parse_pgm(bytes_of("P")), ParseError);
}

TEST_CASE("file round trip") {
  Rng rng(12);
  const auto img = random_image(rng, 16, 16);
  const auto path = (fs::temp_directory_path() / "qksvm_test_roundtrip.pgm").string();
  save_pgm(img, path);
  CHECK(load_pgm(path) == img);
  fs::remove(path);
  CHECK_THROWS_AS(load_pgm(path), IoError);
}

TEST_CASE("downscale_box") {
  SUBCASE("ceil dimensions") {
    const auto out = downscale_box(GrayImage(4032, 3024, 0.25), 10);
    CHECK(out.width == 404);
    CHECK(out.height == 303);
    for (double p : out.pixels) CHECK(p == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("constant image") {
    const auto out = downscale_box(GrayImage(13, 7, 0.5), 3);
    for (double p : out.pixels) CHECK(p == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("block mean") {
    const auto out = downscale_box(GrayImage(2, 2, {0.0, 1.0, 1.0, 0.0}), 2);
    CHECK(out.width == 1);
    CHECK(out.pixels == std::vector<double>{0.5});
  }
  SUBCASE("partial edge block") {
    const auto out = downscale_box(GrayImage(3, 1, {0.0, 1.0, 0.25}), 2);
    CHECK(out.pixels == std::vector<double>{0.5, 0.25});
  }
  SUBCASE("factor 1 is identity") {
    Rng rng(1);
    const auto img = random_image(rng, 9, 4);
    CHECK(downscale_box(img, 1) == img);
  }
  SUBCASE("mean preserved when the factor divides") {
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
      const int f = 1 + static_cast<int>(rng.below(4));
      const auto img = random_image(rng, f * (1 + static_cast<int>(rng.below(10))), f * (1 + static_cast<int>(rng.below(10))));
      CHECK(std::abs(mean(downscale_box(img, f).pixels) - mean(img.pixels)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(downscale_box(GrayImage(2, 2), 0), ArgumentError);
}

TEST_CASE("binarize and flatten") {
  const GrayImage img(2, 1, {0.2, 0.7});
  const auto b = binarize(img, 0.5);
  CHECK(b.pixels == std::vector<double>{0.0, 1.0});
  CHECK(binarize(b, 0.5) == b);
  for (double p : binarize(img, 0.0).pixels) CHECK(p == 1.0);
  CHECK(binarize(GrayImage(1, 1, {0.5}), 0.5).pixels[0] == 1.0);

  CHECK(flatten(GrayImage(3, 1, {0.1, 0.2, 0.3})) == std::vector<double>{0.1, 0.2, 0.3});
  GrayImage grid(2, 2);
  grid.at(1, 0) = 0.1;
  grid.at(0, 1) = 0.2;
  CHECK(flatten(grid) == std::vector<double>{0.0, 0.1, 0.2, 0.0});
  CHECK(flatten(GrayImage(403, 302)).size() == 121706);
}

TEST_CASE("synth_generate") {
  const auto c = small_config();
  const auto a = synth_generate(c, 5);
  const auto b = synth_generate(c, 5);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(encode_pgm(a.samples[i].image) == encode_pgm(b.samples[i].image));
    CHECK(a.samples[i].label == b.samples[i].label);
  }
  CHECK(a.count(kNormal) == 10);
  CHECK(a.count(kAnomaly) == 10);
  CHECK(encode_pgm(synth_generate(c, 6).samples[0].image) != encode_pgm(a.samples[0].image));
  for (const auto& s : a.samples)
    for (double p : s.image.pixels) CHECK((p >= 0.0 && p <= 1.0));

  SUBCASE("crack pixels are darker on average") {
    double normal = 0.0, anomaly = 0.0;
    for (const auto& s : a.samples) (s.label == kAnomaly ? anomaly : normal) += mean(s.image.pixels);
    CHECK(anomaly < normal);
  }
  SUBCASE("zero contrast control") {
    auto flat = c;
    flat.crack_contrast = 0.0;
    const auto d = synth_generate(flat, 5);
    std::vector<double> normal, anomaly;
    for (const auto& s : d.samples) (s.label == kAnomaly ? anomaly : normal).push_back(mean(s.image.pixels));
    CHECK(std::abs(mean(anomaly) - mean(normal)) < c.noise_sigma);
    // Normal samples do not depend on the crack settings at all.
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.samples[i].label == kNormal) CHECK(d.samples[i].image == a.samples[i].image);
  }
  SUBCASE("config json round trip") {
    CHECK(to_json(synth_config_from_json(to_json(c))) == to_json(c));
  }
  auto bad = c;
  bad.anomaly_count = 0;
  CHECK_THROWS_AS(synth_generate(bad, 1), ArgumentError);
}

TEST_CASE("default synthetic dataset supports the reference split sizes") {
  const auto ds = synth_generate(SynthConfig{}, 1);
  CHECK(ds.count(kNormal) == 33);
  CHECK(ds.count(kAnomaly) == 33);
  CHECK(ds.samples.front().image.width == 403);
  CHECK(ds.samples.front().image.height == 302);
  const auto [train, test] = stratified_split(ds, 24, 9, 1);
  CHECK(train.count(kNormal) == 24);
  CHECK(train.count(kAnomaly) == 24);
  CHECK(test.count(kNormal) == 9);
  CHECK(test.count(kAnomaly) == 9);
  std::set<std::string> used;
  for (const auto& s : train.samples) used.insert(s.name);
  for (const auto& s : test.samples) used.insert(s.name);
  CHECK(used.size() == 66);  // every anomaly used exactly once
}

TEST_CASE("stratified_split properties") {
  const auto ds = synth_generate(small_config(), 9);
  Rng rng(14);
  for (int t = 0; t < 30; ++t) {
    const std::size_t tr = 1 + rng.below(6), te = 1 + rng.below(4);
    const std::uint64_t seed = rng.next_u64();
    const auto [train, test] = stratified_split(ds, tr, te, seed);
    const auto [train2, test2] = stratified_split(ds, tr, te, seed);
    std::set<std::string> train_names, test_names;
    for (const auto& s : train.samples) train_names.insert(s.name);
    for (const auto& s : test.samples) test_names.insert(s.name);
    CHECK(train_names.size() == 2 * tr);
    CHECK(test_names.size() == 2 * te);
    for (const auto& n : test_names) CHECK(train_names.count(n) == 0);
    for (std::size_t i = 0; i < train.size(); ++i) CHECK(train.samples[i].name == train2.samples[i].name);
    for (std::size_t i = 0; i < test.size(); ++i) CHECK(test.samples[i].name == test2.samples[i].name);
    // Normals first.
    CHECK(std::is_sorted(train.samples.begin(), train.samples.end(),
                         [](const Sample& a, const Sample& b) { return a.label < b.label; }));
  }
  CHECK_THROWS_AS(stratified_split(ds, 8, 3, 1), ArgumentError);
}

TEST_CASE("dataset directory round trip") {
  const auto ds = synth_generate(small_config(), 21);
  const auto root = (fs::temp_directory_path() / "qksvm_test_dataset").string();
  fs::remove_all(root);
  save_dataset(ds, root, {{"seed", 21}});
  CHECK(fs::exists(fs::path(root) / "manifest.json"));
  const auto back = load_dataset(root);
  REQUIRE(back.size() == ds.size());
  CHECK(back.count(kAnomaly) == 10);
  // 8-bit storage quantises intensities.
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& orig = std::find_if(ds.samples.begin(), ds.samples.end(),
                                    [&](const Sample& s) { return s.name == back.samples[i].name; });
    REQUIRE(orig != ds.samples.end());
    CHECK(orig->label == back.samples[i].label);
    for (std::size_t p = 0; p < orig->image.size(); ++p)
      CHECK(std::abs(orig->image.pixels[p] - back.samples[i].image.pixels[p]) <= 0.5 / 255 + 1e-12);
  }
  fs::remove_all(root);
  CHECK_THROWS_AS(load_dataset(root), IoError);
}
