#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asc/common.hpp"
#include "asc/eigen_select.hpp"
#include "asc/embed_cluster.hpp"
#include "asc/gng.hpp"
#include "asc/image.hpp"
#include "asc/linalg.hpp"
#include "asc/synthetic.hpp"

namespace asc {

/// Optional artifact paths; empty string = skip.
struct OutputPaths {
  std::string report_json;
  std::string labels_csv;       // per-point or per-pixel labels
  std::string neuron_labels_csv;
  std::string label_png;        // segmentation only
  std::string scores_csv;
  std::string curve_csv;
  std::string histogram_json;
  std::string affinity_csv;
  std::string laplacian_csv;
  std::string model_stem;       // writes <stem>_neurons.csv and <stem>_edges.csv
};

struct RunConfig {
  std::int64_t seed = 0;
  int m = 0;  // 0 = auto: elbow for points, 100 for images
  std::vector<int> elbow_candidates = {4, 8, 16, 32, 64, 128, 256};
  int scale_neighbor_k = 1;
  double variance_threshold = 0.8;
  int k_max = 0;  // 0 = auto: min(m, 50)
  FeatureMode feature_mode = FeatureMode::rgb;
  GngParams gng;  // seed and m_target are overridden per run
  bool median_filter = true;
  std::size_t train_pixel_cap = 500000;  // 0 = train on every pixel
  bool refine_use_components = false;
  int kmeans_restarts = 10;
  int kmeans_max_iterations = 300;
  int elbow_restarts = 2;
  int elbow_max_iterations = 100;
  LabelColumn label_column = LabelColumn::automatic;
  bool emit_timings = true;
  OutputPaths outputs;

  std::string to_json_string(int indent = -1) const;
  static RunConfig from_json_string(const std::string& text);
  void validate() const;
};

struct MSelectionInfo {
  std::string mode;  // "fixed" | "elbow" | "image_default" | "degenerate"
  std::vector<int> candidates;
  std::vector<double> errors;
  int selected = 0;
};

/// Everything a run learned, serializable to JSON for reports and plots.
struct PipelineReport {
  std::string kind;  // "cluster" | "segment"
  std::int64_t seed = 0;
  int m_used = 0;
  MSelectionInfo m_selection;
  std::size_t input_count = 0;   // points or pixels
  bool degenerate_input = false;

  std::size_t gng_neurons = 0;
  std::size_t gng_edges = 0;
  std::size_t gng_components = 0;
  TrainStats train_stats;

  std::vector<double> eigenvalues;
  std::vector<EigenScore> scores;
  double score_mu = 0.0;
  double score_sigma = 0.0;
  double score_mu_log10 = 0.0;
  double score_sigma_log10 = 0.0;
  double fd_bin_width = 0.0;
  HistogramData histogram;
  std::vector<std::size_t> chosen_indices;  // 1-based
  bool selection_fallback = false;
  std::size_t x_columns = 0;
  std::size_t x_star_columns = 0;
  int eigengap_estimate = 0;

  KSelectionCurve k_curve;
  int chosen_k = 1;
  std::vector<std::size_t> cluster_sizes;  // over points/pixels

  std::vector<std::string> diagnostics;
  std::map<std::string, double> timings_ms;
  bool emit_timings = true;

  std::string to_json_string(int indent = -1) const;
};

struct ClusterOutcome {
  GngModel model;
  std::vector<int> neuron_labels;
  std::vector<int> point_labels;
  PipelineReport report;
};

/// Point pipeline: representative size selection (elbow unless fixed), graph
/// growth, locally scaled affinity, Laplacian spectrum, eigenvector selection,
/// self-tuned k, and back-projection of neuron labels to points.
ClusterOutcome cluster_points(const Matrix& points, const RunConfig& config);

struct SegmentOutcome {
  GngModel model;
  std::vector<int> neuron_labels;
  LabelImage labels;
  PipelineReport report;
};

/// Image pipeline: pixel features, the point pipeline over them (m defaults to
/// 100), per-pixel labeling, and 3x3 median smoothing.
SegmentOutcome segment_image(const Image& image, const RunConfig& config);

/// Writes every artifact requested by config.outputs.
void write_cluster_outputs(const ClusterOutcome& outcome, const RunConfig& config);
void write_segment_outputs(const SegmentOutcome& outcome, const RunConfig& config);

void write_report_scores_csv(const PipelineReport& report, const std::string& path);
void write_report_curve_csv(const PipelineReport& report, const std::string& path);
void write_report_histogram_json(const PipelineReport& report, const std::string& path);

/// Repeats cluster_points over `runs` consecutive seeds (optionally in
/// parallel) and aggregates chosen_k counts, selected-eigenvector counts and
/// best-match accuracy against `true_labels` (may be empty). Returns a JSON
/// document.
std::string sweep_points(const Matrix& points, const std::vector<int>& true_labels,
                         const RunConfig& base_config, std::int64_t base_seed, int runs, int jobs);

}  // namespace asc
