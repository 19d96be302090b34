#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asc/common.hpp"
#include "asc/gng.hpp"
#include "asc/linalg.hpp"

namespace asc {

/// 8-bit RGB raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
};

/// Reads a PNG or binary PPM (P6), dispatching on the file signature.
Image read_image(const std::string& path);
Image read_png(const std::string& path);
Image read_ppm(const std::string& path);
void write_ppm(const Image& image, const std::string& path);

/// Per-pixel integer segment labels.
struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<int> labels;  // row-major, width*height entries

  int label_count() const;  // number of distinct labels
};

enum class FeatureMode { rgb, rgbxy };

FeatureMode feature_mode_from_string(const std::string& name);
const char* feature_mode_name(FeatureMode mode);

/// Per-pixel feature rows: RGB scaled to [0,1]; rgbxy appends the pixel
/// coordinates normalized to [0,1] (zero for single-pixel extents).
struct ImageFeatures {
  int width = 0;
  int height = 0;
  Matrix features;  // one row per pixel, row-major pixel order
};

ImageFeatures extract_features(const Image& image, FeatureMode mode);

/// Each pixel takes the cluster label of its nearest neuron.
LabelImage assign_pixels(const GngModel& model, const std::vector<int>& neuron_labels,
                         const ImageFeatures& features);

/// Majority label of the clipped 3x3 neighborhood; ties keep the center label.
LabelImage median_filter_3x3(const LabelImage& labels);

/// Indexed PNG with a deterministic palette (truecolor fallback past 256 labels).
void write_label_png(const LabelImage& labels, const std::string& path);
void write_label_csv(const LabelImage& labels, const std::string& path);
LabelImage read_label_csv(const std::string& path);

/// Maps distinct colors to label ids (ascending RGB order) — used to load
/// ground-truth segmentations stored as images.
LabelImage label_image_from_colors(const Image& image);

}  // namespace asc
