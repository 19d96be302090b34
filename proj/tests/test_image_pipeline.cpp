#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "asc/eval_metrics.hpp"
#include "asc/image.hpp"
#include "asc/pipeline.hpp"

using namespace asc;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Image flat_color_strips(int width, int height) {
  // vertical thirds: red | green | blue
  Image img;
  img.width = width;
  img.height = height;
  img.rgb.resize(img.pixel_count() * 3, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::uint8_t* px = img.rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
      if (x < width / 3) px[0] = 220;
      else if (x < 2 * width / 3) px[1] = 200;
      else px[2] = 230;
    }
  }
  return img;
}

std::vector<int> strip_ground_truth(int width, int height) {
  std::vector<int> gt(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      gt[static_cast<std::size_t>(y) * width + x] = x < width / 3 ? 0 : (x < 2 * width / 3 ? 1 : 2);
  return gt;
}

}  // namespace

TEST_CASE("extract_features: trivial shapes and normalization") {
  Image black;
  black.width = 1;
  black.height = 1;
  black.rgb = {0, 0, 0};
  const ImageFeatures f = extract_features(black, FeatureMode::rgb);
  CHECK(f.features.rows() == 1);
  CHECK(f.features.cols() == 3);
  CHECK(f.features(0, 0) == 0.0);

  Image bw;
  bw.width = 2;
  bw.height = 1;
  bw.rgb = {0, 0, 0, 255, 255, 255};
  const ImageFeatures g = extract_features(bw, FeatureMode::rgbxy);
  REQUIRE(g.features.cols() == 5);
  CHECK(g.features(0, 0) == 0.0);
  CHECK(g.features(0, 3) == 0.0);
  CHECK(g.features(0, 4) == 0.0);
  CHECK(g.features(1, 0) == 1.0);
  CHECK(g.features(1, 3) == 1.0);
  CHECK(g.features(1, 4) == 0.0);  // single-row image: y stays 0
}

TEST_CASE("assign_pixels: nearest neuron wins") {
  GngModel m;
  m.neurons.push_back({{0.0, 0.0, 0.0}, 0.0});
  m.neurons.push_back({{1.0, 1.0, 1.0}, 0.0});
  Image img;
  img.width = 2;
  img.height = 1;
  img.rgb = {10, 10, 10, 240, 240, 240};
  const LabelImage out = assign_pixels(m, {4, 9}, extract_features(img, FeatureMode::rgb));
  CHECK(out.labels == std::vector<int>{4, 9});
}

TEST_CASE("assign_pixels: constant neuron labels give a constant image") {
  GngModel m;
  m.neurons.push_back({{0.0, 0.0, 0.0}, 0.0});
  m.neurons.push_back({{1.0, 1.0, 1.0}, 0.0});
  Image img = flat_color_strips(9, 3);
  const LabelImage out = assign_pixels(m, {3, 3}, extract_features(img, FeatureMode::rgb));
  for (int l : out.labels) CHECK(l == 3);
}

TEST_CASE("median_filter_3x3: uniform image is unchanged") {
  LabelImage img{4, 3, std::vector<int>(12, 5)};
  CHECK(median_filter_3x3(img).labels == img.labels);
}

TEST_CASE("median_filter_3x3: lone dissenter is absorbed") {
  LabelImage img{3, 3, std::vector<int>(9, 1)};
  img.labels[4] = 9;  // center pixel
  const LabelImage out = median_filter_3x3(img);
  CHECK(out.labels[4] == 1);
}

TEST_CASE("median_filter_3x3: 4-4 tie keeps the center label") {
  // 3x3 window with four 0s, four 1s and a center 2
  LabelImage img{3, 3, {0, 0, 0, 0, 2, 1, 1, 1, 1}};
  const LabelImage out = median_filter_3x3(img);
  CHECK(out.labels[4] == 2);
}

TEST_CASE("median_filter_3x3: never invents labels") {
  Rng rng(9);
  LabelImage img{8, 8, std::vector<int>(64)};
  for (int& l : img.labels) l = static_cast<int>(rng.next_index(4)) * 3;
  const std::set<int> before(img.labels.begin(), img.labels.end());
  const LabelImage out = median_filter_3x3(img);
  for (int l : out.labels) CHECK(before.count(l) == 1);
}

TEST_CASE("ppm round trip and png label writing") {
  const Image img = flat_color_strips(12, 8);
  const std::string ppm = temp_path("asc_test_strips.ppm");
  write_ppm(img, ppm);
  const Image back = read_ppm(ppm);
  CHECK(back.width == img.width);
  CHECK(back.height == img.height);
  CHECK(back.rgb == img.rgb);
  const Image dispatched = read_image(ppm);
  CHECK(dispatched.rgb == img.rgb);

  LabelImage labels{12, 8, std::vector<int>(96, 0)};
  for (std::size_t i = 0; i < labels.labels.size(); ++i)
    labels.labels[i] = static_cast<int>(i % 3);
  const std::string png = temp_path("asc_test_labels.png");
  write_label_png(labels, png);
  const Image decoded = read_png(png);
  CHECK(decoded.width == 12);
  CHECK(decoded.height == 8);
  const LabelImage roundtrip = label_image_from_colors(decoded);
  CHECK(clustering_accuracy(roundtrip.labels, labels.labels) == doctest::Approx(1.0));
  std::remove(ppm.c_str());
  std::remove(png.c_str());
}

TEST_CASE("read_image: unreadable and undecodable files raise io errors") {
  CHECK_THROWS_AS((void)read_image(temp_path("asc_no_such_file_X.png")), Error);
  const std::string bogus = temp_path("asc_bogus.png");
  std::ofstream(bogus) << "definitely not an image";
  try {
    (void)read_image(bogus);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.status() == Status::io_error);
  }
  std::remove(bogus.c_str());
}

TEST_CASE("label csv round trip") {
  LabelImage labels{3, 2, {0, 1, 2, 2, 1, 0}};
  const std::string path = temp_path("asc_labels.csv");
  write_label_csv(labels, path);
  const LabelImage back = read_label_csv(path);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.labels == labels.labels);
  std::remove(path.c_str());
}

TEST_CASE("segment_image: three flat colors recover three segments") {
  const Image img = flat_color_strips(64, 64);
  RunConfig config;
  config.seed = 2;
  const SegmentOutcome out = segment_image(img, config);

  CHECK(out.labels.width == 64);
  CHECK(out.labels.height == 64);
  CHECK(out.report.chosen_k == 3);
  CHECK(out.labels.label_count() == 3);

  const std::vector<int> gt = strip_ground_truth(64, 64);
  CHECK(segmentation_covering(out.labels.labels, gt) >= 0.95);
  CHECK(vi(out.labels.labels, gt) <= 0.2);
}

namespace {

// banded image with per-pixel noise: enough distinct colors to exercise the
// full quantization pipeline
Image noisy_bands(int width, int height, std::uint64_t seed) {
  Image img;
  img.width = width;
  img.height = height;
  img.rgb.resize(img.pixel_count() * 3);
  Rng rng(seed);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::uint8_t* px = img.rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
      const int band = 3 * x / width;
      const auto jitter = [&] { return static_cast<std::uint8_t>(rng.next_index(32)); };
      px[0] = static_cast<std::uint8_t>((band == 0 ? 200 : 10) + jitter());
      px[1] = static_cast<std::uint8_t>((band == 1 ? 200 : 10) + jitter());
      px[2] = static_cast<std::uint8_t>((band == 2 ? 200 : 10) + jitter());
    }
  }
  return img;
}

}  // namespace

TEST_CASE("segment_image: m defaults to 100 on multi-color images") {
  const Image img = noisy_bands(48, 48, 3);
  RunConfig config;
  config.seed = 5;
  const SegmentOutcome out = segment_image(img, config);
  CHECK(out.report.m_used == 100);
  CHECK(out.report.m_selection.mode == "image_default");
  CHECK(out.report.chosen_k >= 2);

  const std::vector<int> gt = strip_ground_truth(48, 48);
  CHECK(segmentation_covering(out.labels.labels, gt) >= 0.90);
}

TEST_CASE("segment_image: single-color image takes the degenerate path") {
  Image img;
  img.width = 16;
  img.height = 16;
  img.rgb.assign(16 * 16 * 3, 128);
  RunConfig config;
  config.seed = 1;
  const SegmentOutcome out = segment_image(img, config);
  CHECK(out.report.degenerate_input);
  CHECK(out.labels.label_count() <= 2);
  CHECK(!out.report.diagnostics.empty());
  CHECK(out.labels.labels.size() == 256);
  // report serializes without NaN or null
  CHECK_NOTHROW((void)out.report.to_json_string());
}

TEST_CASE("segment_image: deterministic labels for a fixed seed") {
  const Image img = flat_color_strips(32, 32);
  RunConfig config;
  config.seed = 11;
  config.emit_timings = false;
  const SegmentOutcome a = segment_image(img, config);
  const SegmentOutcome b = segment_image(img, config);
  CHECK(a.labels.labels == b.labels.labels);
  CHECK(a.report.to_json_string() == b.report.to_json_string());
}

TEST_CASE("segment_image: cluster permutations keep metrics fixed") {
  const Image img = flat_color_strips(48, 48);
  RunConfig config;
  config.seed = 3;
  const SegmentOutcome out = segment_image(img, config);
  const std::vector<int> gt = strip_ground_truth(48, 48);
  std::vector<int> permuted(out.labels.labels);
  for (int& l : permuted) l = (l + 1) % 3;
  CHECK(segmentation_covering(permuted, gt) ==
        doctest::Approx(segmentation_covering(out.labels.labels, gt)).epsilon(1e-12));
  CHECK(vi(permuted, gt) == doctest::Approx(vi(out.labels.labels, gt)).epsilon(1e-12));
}

TEST_CASE("segment_image: training subsample keeps full-resolution labels") {
  const Image img = noisy_bands(40, 40, 9);
  RunConfig config;
  config.seed = 4;
  config.train_pixel_cap = 400;  // force the subsampling path
  const SegmentOutcome out = segment_image(img, config);
  CHECK(out.labels.labels.size() == 1600);
  CHECK(out.report.chosen_k >= 2);
  bool noted = false;
  for (const std::string& d : out.report.diagnostics)
    if (d.find("subsampled") != std::string::npos) noted = true;
  CHECK(noted);
}
