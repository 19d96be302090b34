#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asc/common.hpp"
#include "asc/linalg.hpp"

namespace asc {

struct PointSet {
  Matrix points;            // one row per point
  std::vector<int> labels;  // empty when unlabeled
};

struct RingSpec {
  double radius = 1.0;
  double width = 0.2;  // radial thickness of the annulus
  int count = 300;
};

struct BlobSpec {
  std::vector<double> center;
  double sigma = 0.5;
  int count = 200;
};

/// Concentric noisy circles; point label = ring index.
PointSet gen_rings(const std::vector<RingSpec>& rings, std::uint64_t seed);

/// Isotropic Gaussian clusters; point label = blob index.
PointSet gen_blobs(const std::vector<BlobSpec>& blobs, std::uint64_t seed);

/// Rings plus uniform background clutter labeled as its own class.
PointSet gen_rings_with_noise(const std::vector<RingSpec>& rings, int noise_count,
                              std::uint64_t seed);

/// Dispatch by kind name ("rings" | "blobs" | "rings_with_noise") with a JSON
/// parameter object; missing fields take the documented defaults.
PointSet generate_synthetic(const std::string& kind, const std::string& params_json,
                            std::uint64_t seed);

/// x,y(,...),label rows; header included by default.
void write_points_csv(const PointSet& points, const std::string& path, bool header = true);

enum class LabelColumn { automatic, none, last };

/// Reads comma-separated points. An optional header row is skipped; with
/// LabelColumn::automatic a trailing all-integer column is treated as labels.
/// Parse failures report the offending line number.
PointSet read_points_csv(const std::string& path, LabelColumn label_column = LabelColumn::automatic);

}  // namespace asc
