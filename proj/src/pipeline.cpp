#include "asc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "asc/eval_metrics.hpp"
#include "asc/spectral_graph.hpp"

namespace asc {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSaltElbow = 0x656c626f77ULL;
constexpr std::uint64_t kSaltGng = 0x676e67ULL;
constexpr std::uint64_t kSaltCurve = 0x726bULL;
constexpr std::uint64_t kSaltSubsample = 0x737562ULL;

class StageClock {
 public:
  explicit StageClock(PipelineReport& report) : report_(report), start_(now()) {}

  void lap(const std::string& name) {
    const double t = now();
    report_.timings_ms[name] = t - mark_;
    mark_ = t;
  }
  void total() { report_.timings_ms["total"] = now() - start_; }

 private:
  static double now() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
  PipelineReport& report_;
  double start_;
  double mark_ = now();
};

template <class F>
auto stage(const char* name, F&& fn) {
  try {
    return fn();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(name);
    throw;
  }
}

std::size_t count_distinct(const std::vector<std::vector<double>>& rows) {
  std::vector<const std::vector<double>*> ptrs;
  ptrs.reserve(rows.size());
  for (const auto& r : rows) ptrs.push_back(&r);
  std::sort(ptrs.begin(), ptrs.end(),
            [](const auto* a, const auto* b) { return *a < *b; });
  std::size_t distinct = rows.empty() ? 0 : 1;
  for (std::size_t i = 1; i < ptrs.size(); ++i)
    if (*ptrs[i] != *ptrs[i - 1]) ++distinct;
  return distinct;
}

// Labels each row by the lexicographic rank of its value among the distinct
// rows. Used when the input has too few distinct values for quantization to be
// meaningful: the distinct values themselves are the clusters.
std::vector<int> discrete_value_labels(const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<double>> unique(rows);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<int> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto it = std::lower_bound(unique.begin(), unique.end(), rows[i]);
    labels[i] = static_cast<int>(it - unique.begin());
  }
  return labels;
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows[i] = m.row(i);
  return rows;
}

std::uint64_t run_seed(std::int64_t seed, std::uint64_t salt) {
  return Rng::stream(static_cast<std::uint64_t>(seed), salt).next_u64();
}

/// Spectral stages shared by the point and image pipelines: scales, affinity,
/// Laplacian, spectrum, eigenvector selection, self-tuned k, neuron labels.
std::vector<int> run_spectral(const GngModel& model, const RunConfig& config,
                              PipelineReport& report, Diagnostics& diag, StageClock& clock) {
  const std::size_t m = model.neurons.size();
  report.gng_neurons = m;
  report.gng_edges = model.edges.size();
  report.gng_components = model.component_count();

  const SpectralDecomposition decomp = stage("spectral", [&] {
    const LocalScales scales =
        local_scales(model, static_cast<std::size_t>(config.scale_neighbor_k), &diag);
    const AffinityMatrix a = affinity(model, scales, &diag);
    if (!config.outputs.affinity_csv.empty()) dump_matrix_csv(a.dense(), config.outputs.affinity_csv);
    const LaplacianSym l = normalized_laplacian(a, &diag);
    if (!config.outputs.laplacian_csv.empty())
      dump_matrix_csv(l.matrix.matrix(), config.outputs.laplacian_csv);
    return spectrum(l);
  });
  report.eigenvalues = decomp.eigenvalues;
  clock.lap("spectral");

  const int k_max = std::max(
      2, static_cast<int>(std::min<std::size_t>(
             config.k_max > 0 ? static_cast<std::size_t>(config.k_max) : 50, m)));
  report.eigengap_estimate = eigengap_k(decomp.eigenvalues, k_max);

  const SelectionResult selection = stage("eigenvector_selection", [&] {
    const std::vector<EigenScore> scores = relevance_scores(decomp, &diag);
    return select_eigenvectors(scores, decomp, config.variance_threshold,
                               config.refine_use_components, &diag);
  });
  report.scores = selection.scores;
  report.score_mu = selection.mu;
  report.score_sigma = selection.sigma;
  report.score_mu_log10 = selection.mu_log10;
  report.score_sigma_log10 = selection.sigma_log10;
  report.fd_bin_width = selection.fd_width;
  report.histogram = score_histogram(selection, &diag);
  report.chosen_indices = selection.chosen;
  report.selection_fallback = selection.fallback_used;
  report.x_columns = selection.x.cols();
  report.x_star_columns = selection.x_star.cols();
  clock.lap("eigenvector_selection");

  KMeansOptions opts{config.kmeans_restarts, config.kmeans_max_iterations};
  const std::uint64_t curve_seed = run_seed(config.seed, kSaltCurve);
  std::vector<int> neuron_labels;
  stage("k_selection", [&] {
    report.k_curve = r_k_curve(selection.x_star, decomp.eigenvalues, 2, k_max, curve_seed, opts, &diag);
    report.chosen_k = report.k_curve.chosen_k;
    const KMeansResult final = kmeans(selection.x_star, report.chosen_k,
                                      curve_kmeans_seed(curve_seed, report.chosen_k), opts, &diag);
    neuron_labels = final.labels;
    return 0;
  });
  clock.lap("k_selection");
  return neuron_labels;
}

PipelineReport make_report(const char* kind, const RunConfig& config, std::size_t input_count) {
  PipelineReport report;
  report.kind = kind;
  report.seed = config.seed;
  report.input_count = input_count;
  report.emit_timings = config.emit_timings;
  return report;
}

std::vector<std::size_t> label_sizes(const std::vector<int>& labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::vector<std::size_t> sizes;
  sizes.reserve(counts.size());
  for (const auto& [label, count] : counts) sizes.push_back(count);
  return sizes;
}

void finish_trivial(PipelineReport& report, Diagnostics& diag, const std::vector<int>& labels,
                    const std::string& why) {
  diag.note(why);
  report.degenerate_input = true;
  report.m_selection.mode = "degenerate";
  report.cluster_sizes = label_sizes(labels);
  report.chosen_k = static_cast<int>(report.cluster_sizes.size());
}

void densify_labels(std::vector<int>& labels) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  for (int& l : labels) l = ids[l];
}

}  // namespace

ClusterOutcome cluster_points(const Matrix& points, const RunConfig& config) {
  config.validate();
  if (points.rows() == 0 || points.cols() == 0)
    throw Error(Status::invalid_argument, "cluster_points needs a non-empty point set", "input");
  for (double v : points.data())
    if (!std::isfinite(v))
      throw Error(Status::invalid_argument, "points contain non-finite values", "input");

  ClusterOutcome out;
  out.report = make_report("cluster", config, points.rows());
  Diagnostics diag;
  StageClock clock(out.report);

  const std::vector<std::vector<double>> data = matrix_rows(points);
  const std::size_t n = data.size();
  const std::size_t distinct = count_distinct(data);

  // too few distinct values for quantization: the values are the clusters
  if (distinct < 5) {
    out.point_labels = distinct < 2 ? std::vector<int>(n, 0) : discrete_value_labels(data);
    finish_trivial(out.report, diag, out.point_labels,
                   "input: only " + std::to_string(distinct) +
                       " distinct points; each distinct value forms a cluster");
    out.report.diagnostics = diag.messages();
    clock.total();
    write_cluster_outputs(out, config);
    return out;
  }

  // representative count: fixed, or the elbow of the quantization-error curve
  int m_used;
  if (config.m > 0) {
    if (static_cast<std::size_t>(config.m) > n)
      throw Error(Status::invalid_argument, "m exceeds the number of points", "input");
    m_used = config.m;
    out.report.m_selection.mode = "fixed";
    out.report.m_selection.selected = m_used;
  } else {
    std::size_t usable = 0;
    for (int c : config.elbow_candidates)
      if (c >= 2 && static_cast<std::size_t>(c) <= n) ++usable;
    if (usable < 3) {
      // too few points to sketch an error curve; take a third of them
      m_used = static_cast<int>(std::max<std::size_t>(5, n / 3));
      diag.note("pipeline: not enough usable elbow candidates; m set to " +
                std::to_string(m_used));
      out.report.m_selection.mode = "degenerate";
      out.report.m_selection.selected = m_used;
    } else {
      const ElbowResult elbow = stage("elbow", [&] {
        return select_m_elbow(data, config.elbow_candidates, run_seed(config.seed, kSaltElbow),
                              {config.elbow_restarts, config.elbow_max_iterations}, &diag);
      });
      out.report.m_selection.mode = elbow.degenerate ? "degenerate" : "elbow";
      out.report.m_selection.candidates = elbow.candidates;
      out.report.m_selection.errors = elbow.errors;
      out.report.m_selection.selected = elbow.selected;
      m_used = elbow.selected;
      if (m_used < 5) {
        diag.note("pipeline: elbow selected m=" + std::to_string(m_used) +
                  "; raised to 5 for eigenvector scoring");
        m_used = 5;
      }
    }
  }
  if (static_cast<std::size_t>(m_used) > n) m_used = static_cast<int>(n);
  if (static_cast<std::size_t>(m_used) > distinct) {
    diag.note("pipeline: m reduced to the number of distinct points (" +
              std::to_string(distinct) + ")");
    m_used = static_cast<int>(distinct);
  }
  out.report.m_used = m_used;
  clock.lap("m_selection");

  GngParams params = config.gng;
  params.seed = run_seed(config.seed, kSaltGng);
  params.m_target = static_cast<std::size_t>(m_used);
  out.model = stage("gng", [&] { return train(data, params, &diag, &out.report.train_stats); });
  clock.lap("gng");

  if (out.model.neurons.size() < 5) {
    out.neuron_labels.assign(out.model.neurons.size(), 0);
    out.point_labels.assign(n, 0);
    finish_trivial(out.report, diag, out.point_labels,
                   "gng: fewer than 5 neurons survived; trivial single cluster");
    out.report.diagnostics = diag.messages();
    clock.total();
    write_cluster_outputs(out, config);
    return out;
  }

  out.neuron_labels = run_spectral(out.model, config, out.report, diag, clock);

  stage("assignment", [&] {
    out.point_labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto [bmu, second] = find_bmu(out.model, data[i]);
      (void)second;
      out.point_labels[i] = out.neuron_labels[bmu];
    }
    return 0;
  });
  out.report.cluster_sizes = label_sizes(out.point_labels);
  clock.lap("assignment");

  out.report.diagnostics = diag.messages();
  clock.total();
  write_cluster_outputs(out, config);
  return out;
}

SegmentOutcome segment_image(const Image& image, const RunConfig& config) {
  config.validate();

  SegmentOutcome out;
  out.report = make_report("segment", config, image.pixel_count());
  Diagnostics diag;
  StageClock clock(out.report);

  const ImageFeatures features =
      stage("features", [&] { return extract_features(image, config.feature_mode); });
  clock.lap("features");

  const std::size_t n = features.features.rows();
  std::vector<std::vector<double>> signals = matrix_rows(features.features);
  const std::size_t distinct = count_distinct(signals);

  // flat-color inputs: the distinct feature vectors are the segments
  if (distinct < 5) {
    out.labels.width = features.width;
    out.labels.height = features.height;
    out.labels.labels = distinct < 2 ? std::vector<int>(n, 0) : discrete_value_labels(signals);
    if (config.median_filter && distinct >= 2)
      out.labels = median_filter_3x3(out.labels);
    finish_trivial(out.report, diag, out.labels.labels,
                   "input: only " + std::to_string(distinct) +
                       " distinct pixel features; each distinct value forms a segment");
    out.report.diagnostics = diag.messages();
    clock.total();
    write_segment_outputs(out, config);
    return out;
  }

  if (config.train_pixel_cap > 0 && signals.size() > config.train_pixel_cap) {
    diag.note("pipeline: training signals subsampled to " + std::to_string(config.train_pixel_cap) +
              " of " + std::to_string(signals.size()) + " pixels");
    Rng rng = Rng::stream(static_cast<std::uint64_t>(config.seed), kSaltSubsample);
    std::vector<std::size_t> idx(signals.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < config.train_pixel_cap; ++i) {
      const std::size_t j = i + rng.next_index(idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(config.train_pixel_cap);
    std::vector<std::vector<double>> sub;
    sub.reserve(idx.size());
    for (std::size_t i : idx) sub.push_back(std::move(signals[i]));
    signals = std::move(sub);
  }

  int m_used = config.m > 0 ? config.m : 100;
  out.report.m_selection.mode = config.m > 0 ? "fixed" : "image_default";
  if (static_cast<std::size_t>(m_used) > signals.size()) {
    diag.note("pipeline: m reduced to the number of training signals (" +
              std::to_string(signals.size()) + ")");
    m_used = static_cast<int>(signals.size());
  }
  if (static_cast<std::size_t>(m_used) > distinct) {
    diag.note("pipeline: m reduced to the number of distinct pixel features (" +
              std::to_string(distinct) + ")");
    m_used = static_cast<int>(distinct);
  }
  out.report.m_selection.selected = m_used;
  out.report.m_used = m_used;

  GngParams params = config.gng;
  params.seed = run_seed(config.seed, kSaltGng);
  params.m_target = static_cast<std::size_t>(m_used);
  out.model = stage("gng", [&] { return train(signals, params, &diag, &out.report.train_stats); });
  clock.lap("gng");

  if (out.model.neurons.size() < 5) {
    out.neuron_labels.assign(out.model.neurons.size(), 0);
    out.labels = {features.width, features.height, std::vector<int>(n, 0)};
    finish_trivial(out.report, diag, out.labels.labels,
                   "gng: fewer than 5 neurons survived; trivial segmentation");
    out.report.diagnostics = diag.messages();
    clock.total();
    write_segment_outputs(out, config);
    return out;
  }

  out.neuron_labels = run_spectral(out.model, config, out.report, diag, clock);

  out.labels = stage("assignment", [&] { return assign_pixels(out.model, out.neuron_labels, features); });
  clock.lap("assignment");

  if (config.median_filter) {
    out.labels = stage("median_filter", [&] { return median_filter_3x3(out.labels); });
    clock.lap("median_filter");
  }
  densify_labels(out.labels.labels);
  out.report.cluster_sizes = label_sizes(out.labels.labels);

  out.report.diagnostics = diag.messages();
  clock.total();
  write_segment_outputs(out, config);
  return out;
}

std::string sweep_points(const Matrix& points, const std::vector<int>& true_labels,
                         const RunConfig& base_config, std::int64_t base_seed, int runs, int jobs) {
  if (runs < 1) throw Error(Status::invalid_argument, "sweep needs at least 1 run");
  if (!true_labels.empty() && true_labels.size() != points.rows())
    throw Error(Status::dimension_mismatch, "true label count does not match point count");

  struct Row {
    std::int64_t seed = 0;
    int chosen_k = 0;
    std::size_t selected = 0;
    double accuracy = -1.0;
    double ms = 0.0;
    bool degenerate = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(runs));

  RunConfig run_config = base_config;
  run_config.outputs = {};  // per-run artifacts are not written during sweeps
  run_config.emit_timings = true;

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<int> next{0};

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= runs) return;
      try {
        RunConfig cfg = run_config;
        cfg.seed = base_seed + i;
        const auto start = std::chrono::steady_clock::now();
        const ClusterOutcome outcome = cluster_points(points, cfg);
        const auto stop = std::chrono::steady_clock::now();
        Row& row = rows[static_cast<std::size_t>(i)];
        row.seed = cfg.seed;
        row.chosen_k = outcome.report.chosen_k;
        row.selected = outcome.report.chosen_indices.size();
        row.degenerate = outcome.report.degenerate_input;
        row.ms = std::chrono::duration<double, std::milli>(stop - start).count();
        if (!true_labels.empty())
          row.accuracy = clustering_accuracy(outcome.point_labels, true_labels);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int thread_count = std::max(1, std::min(jobs, runs));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  json runs_json = json::array();
  std::map<int, int> k_counts;
  std::map<std::size_t, int> selected_counts;
  std::map<int, std::pair<int, double>> per_k;  // k -> (count, accuracy sum)
  double acc_sum = 0.0, acc_min = 2.0, ms_max = 0.0;
  int acc_runs = 0;
  for (const Row& row : rows) {
    json r{{"seed", row.seed},
           {"chosen_k", row.chosen_k},
           {"selected_eigenvectors", row.selected},
           {"degenerate", row.degenerate},
           {"ms", row.ms}};
    if (row.accuracy >= 0.0) r["accuracy"] = row.accuracy;
    runs_json.push_back(r);
    ++k_counts[row.chosen_k];
    ++selected_counts[row.selected];
    ms_max = std::max(ms_max, row.ms);
    if (row.accuracy >= 0.0) {
      acc_sum += row.accuracy;
      acc_min = std::min(acc_min, row.accuracy);
      ++acc_runs;
      auto& [count, sum] = per_k[row.chosen_k];
      ++count;
      sum += row.accuracy;
    }
  }

  json k_json = json::object();
  for (const auto& [k, count] : k_counts) k_json[std::to_string(k)] = count;
  json sel_json = json::object();
  for (const auto& [count, runs_with] : selected_counts) sel_json[std::to_string(count)] = runs_with;
  json per_k_json = json::object();
  for (const auto& [k, stats] : per_k)
    per_k_json[std::to_string(k)] = {{"runs", stats.first},
                                     {"mean_accuracy", stats.second / stats.first}};

  json out{{"base_seed", base_seed},
           {"runs", runs},
           {"jobs", thread_count},
           {"chosen_k_counts", k_json},
           {"selected_eigenvector_counts", sel_json},
           {"max_run_ms", ms_max},
           {"results", runs_json}};
  if (acc_runs > 0) {
    out["accuracy"] = {{"runs", acc_runs},
                       {"mean", acc_sum / acc_runs},
                       {"min", acc_min},
                       {"per_chosen_k", per_k_json}};
  }
  return out.dump(2);
}

}  // namespace asc
