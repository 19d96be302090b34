#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "asc/pipeline.hpp"

namespace asc {

namespace {

using nlohmann::json;

void ensure_finite(const json& node, const std::string& path) {
  if (node.is_number_float() && !std::isfinite(node.get<double>()))
    throw Error(Status::numeric_error, "non-finite value in report at " + path);
  if (node.is_null())
    throw Error(Status::numeric_error, "null value in report at " + path);
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) ensure_finite(value, path + "." + key);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      ensure_finite(node[i], path + "[" + std::to_string(i) + "]");
  }
}

const char* label_column_name(LabelColumn c) {
  switch (c) {
    case LabelColumn::automatic: return "auto";
    case LabelColumn::none: return "none";
    case LabelColumn::last: return "last";
  }
  return "auto";
}

LabelColumn label_column_from_string(const std::string& name) {
  if (name == "auto") return LabelColumn::automatic;
  if (name == "none") return LabelColumn::none;
  if (name == "last") return LabelColumn::last;
  throw Error(Status::invalid_argument, "unknown label_column '" + name + "' (auto|none|last)");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");
  f << text << "\n";
}

}  // namespace

void RunConfig::validate() const {
  if (m < 0) throw Error(Status::invalid_argument, "m must be 0 (auto) or positive");
  if (scale_neighbor_k < 1) throw Error(Status::invalid_argument, "scale_neighbor_k must be >= 1");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0))
    throw Error(Status::invalid_argument, "variance_threshold must be in (0,1]");
  if (k_max < 0) throw Error(Status::invalid_argument, "k_max must be 0 (auto) or positive");
  if (kmeans_restarts < 1 || kmeans_max_iterations < 1 || elbow_restarts < 1 ||
      elbow_max_iterations < 1)
    throw Error(Status::invalid_argument, "iteration/restart settings must be positive");
  gng.validate();
}

std::string RunConfig::to_json_string(int indent) const {
  json j{
      {"seed", seed},
      {"m", m},
      {"elbow_candidates", elbow_candidates},
      {"scale_neighbor_k", scale_neighbor_k},
      {"variance_threshold", variance_threshold},
      {"k_max", k_max},
      {"feature_mode", feature_mode_name(feature_mode)},
      {"gng",
       {{"eps_b", gng.eps_b},
        {"eps_n", gng.eps_n},
        {"insert_interval", gng.insert_interval},
        {"max_age", gng.max_age},
        {"error_split_alpha", gng.error_split_alpha},
        {"error_decay_beta", gng.error_decay_beta},
        {"stability_tol", gng.stability_tol},
        {"max_epochs", gng.max_epochs}}},
      {"median_filter", median_filter},
      {"train_pixel_cap", train_pixel_cap},
      {"refine_use_components", refine_use_components},
      {"kmeans_restarts", kmeans_restarts},
      {"kmeans_max_iterations", kmeans_max_iterations},
      {"elbow_restarts", elbow_restarts},
      {"elbow_max_iterations", elbow_max_iterations},
      {"label_column", label_column_name(label_column)},
      {"emit_timings", emit_timings},
      {"outputs",
       {{"report_json", outputs.report_json},
        {"labels_csv", outputs.labels_csv},
        {"neuron_labels_csv", outputs.neuron_labels_csv},
        {"label_png", outputs.label_png},
        {"scores_csv", outputs.scores_csv},
        {"curve_csv", outputs.curve_csv},
        {"histogram_json", outputs.histogram_json},
        {"affinity_csv", outputs.affinity_csv},
        {"laplacian_csv", outputs.laplacian_csv},
        {"model_stem", outputs.model_stem}}},
  };
  return indent >= 0 ? j.dump(indent) : j.dump();
}

RunConfig RunConfig::from_json_string(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(Status::parse_error, "config must be a JSON object");

  RunConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.m = j.value("m", c.m);
    c.elbow_candidates = j.value("elbow_candidates", c.elbow_candidates);
    c.scale_neighbor_k = j.value("scale_neighbor_k", c.scale_neighbor_k);
    c.variance_threshold = j.value("variance_threshold", c.variance_threshold);
    c.k_max = j.value("k_max", c.k_max);
    if (j.contains("feature_mode"))
      c.feature_mode = feature_mode_from_string(j.at("feature_mode").get<std::string>());
    if (j.contains("gng")) {
      const json& g = j.at("gng");
      c.gng.eps_b = g.value("eps_b", c.gng.eps_b);
      c.gng.eps_n = g.value("eps_n", c.gng.eps_n);
      c.gng.insert_interval = g.value("insert_interval", c.gng.insert_interval);
      c.gng.max_age = g.value("max_age", c.gng.max_age);
      c.gng.error_split_alpha = g.value("error_split_alpha", c.gng.error_split_alpha);
      c.gng.error_decay_beta = g.value("error_decay_beta", c.gng.error_decay_beta);
      c.gng.stability_tol = g.value("stability_tol", c.gng.stability_tol);
      c.gng.max_epochs = g.value("max_epochs", c.gng.max_epochs);
    }
    c.median_filter = j.value("median_filter", c.median_filter);
    c.train_pixel_cap = j.value("train_pixel_cap", c.train_pixel_cap);
    c.refine_use_components = j.value("refine_use_components", c.refine_use_components);
    c.kmeans_restarts = j.value("kmeans_restarts", c.kmeans_restarts);
    c.kmeans_max_iterations = j.value("kmeans_max_iterations", c.kmeans_max_iterations);
    c.elbow_restarts = j.value("elbow_restarts", c.elbow_restarts);
    c.elbow_max_iterations = j.value("elbow_max_iterations", c.elbow_max_iterations);
    if (j.contains("label_column"))
      c.label_column = label_column_from_string(j.at("label_column").get<std::string>());
    c.emit_timings = j.value("emit_timings", c.emit_timings);
    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      c.outputs.report_json = o.value("report_json", std::string{});
      c.outputs.labels_csv = o.value("labels_csv", std::string{});
      c.outputs.neuron_labels_csv = o.value("neuron_labels_csv", std::string{});
      c.outputs.label_png = o.value("label_png", std::string{});
      c.outputs.scores_csv = o.value("scores_csv", std::string{});
      c.outputs.curve_csv = o.value("curve_csv", std::string{});
      c.outputs.histogram_json = o.value("histogram_json", std::string{});
      c.outputs.affinity_csv = o.value("affinity_csv", std::string{});
      c.outputs.laplacian_csv = o.value("laplacian_csv", std::string{});
      c.outputs.model_stem = o.value("model_stem", std::string{});
    }
  } catch (const json::exception& e) {
    throw Error(Status::parse_error, std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string PipelineReport::to_json_string(int indent) const {
  json scores_json = json::array();
  for (const EigenScore& s : scores) {
    const bool chosen =
        std::find(chosen_indices.begin(), chosen_indices.end(), s.index) != chosen_indices.end();
    scores_json.push_back({{"index", s.index},
                           {"lambda", s.lambda},
                           {"dbi2", s.dbi2},
                           {"dbi3", s.dbi3},
                           {"dbi4", s.dbi4},
                           {"dbi_sum", s.dbi_sum},
                           {"r", s.r},
                           {"chosen", chosen}});
  }

  json curve_json = json::array();
  for (const KSelectionEntry& e : k_curve.entries)
    curve_json.push_back(
        {{"k", e.k}, {"dbi", e.dbi}, {"lambda_sum", e.lambda_sum}, {"r", e.r}});

  json j{
      {"kind", kind},
      {"seed", seed},
      {"input_count", input_count},
      {"degenerate_input", degenerate_input},
      {"m",
       {{"used", m_used},
        {"mode", m_selection.mode},
        {"candidates", m_selection.candidates},
        {"errors", m_selection.errors},
        {"selected", m_selection.selected}}},
      {"gng",
       {{"neurons", gng_neurons},
        {"edges", gng_edges},
        {"components", gng_components},
        {"epochs", train_stats.epochs},
        {"final_pass_error", train_stats.final_pass_error},
        {"stable", train_stats.stable}}},
      {"spectrum", {{"eigenvalues", eigenvalues}}},
      {"eigenvector_selection",
       {{"scores", scores_json},
        {"mu", score_mu},
        {"sigma", score_sigma},
        {"mu_log10", score_mu_log10},
        {"sigma_log10", score_sigma_log10},
        {"fd_bin_width", fd_bin_width},
        {"histogram",
         {{"bin_edges", histogram.bin_edges},
          {"counts", histogram.counts},
          {"mu", histogram.mu},
          {"sigma", histogram.sigma},
          {"bin_width", histogram.bin_width}}},
        {"chosen_indices", chosen_indices},
        {"fallback_used", selection_fallback},
        {"x_columns", x_columns},
        {"x_star_columns", x_star_columns},
        {"eigengap_k", eigengap_estimate}}},
      {"k_selection", {{"curve", curve_json}, {"chosen_k", chosen_k}}},
      {"clusters", {{"count", cluster_sizes.size()}, {"sizes", cluster_sizes}}},
      {"diagnostics", diagnostics},
  };
  if (emit_timings) j["timings_ms"] = timings_ms;

  ensure_finite(j, "report");
  return indent >= 0 ? j.dump(indent) : j.dump();
}

void write_cluster_outputs(const ClusterOutcome& outcome, const RunConfig& config) {
  const OutputPaths& paths = config.outputs;
  if (!paths.report_json.empty())
    write_text_file(paths.report_json, outcome.report.to_json_string(2));
  if (!paths.labels_csv.empty()) {
    std::ofstream f(paths.labels_csv);
    if (!f) throw Error(Status::io_error, "cannot open " + paths.labels_csv + " for writing");
    for (int l : outcome.point_labels) f << l << "\n";
  }
  if (!paths.neuron_labels_csv.empty()) {
    std::ofstream f(paths.neuron_labels_csv);
    if (!f)
      throw Error(Status::io_error, "cannot open " + paths.neuron_labels_csv + " for writing");
    for (int l : outcome.neuron_labels) f << l << "\n";
  }
  if (!paths.scores_csv.empty()) write_report_scores_csv(outcome.report, paths.scores_csv);
  if (!paths.curve_csv.empty()) write_report_curve_csv(outcome.report, paths.curve_csv);
  if (!paths.histogram_json.empty())
    write_report_histogram_json(outcome.report, paths.histogram_json);
  if (!paths.model_stem.empty())
    dump_model_csv(outcome.model, paths.model_stem + "_neurons.csv", paths.model_stem + "_edges.csv");
}

void write_segment_outputs(const SegmentOutcome& outcome, const RunConfig& config) {
  const OutputPaths& paths = config.outputs;
  if (!paths.report_json.empty())
    write_text_file(paths.report_json, outcome.report.to_json_string(2));
  if (!paths.labels_csv.empty()) write_label_csv(outcome.labels, paths.labels_csv);
  if (!paths.label_png.empty()) write_label_png(outcome.labels, paths.label_png);
  if (!paths.neuron_labels_csv.empty()) {
    std::ofstream f(paths.neuron_labels_csv);
    if (!f)
      throw Error(Status::io_error, "cannot open " + paths.neuron_labels_csv + " for writing");
    for (int l : outcome.neuron_labels) f << l << "\n";
  }
  if (!paths.scores_csv.empty()) write_report_scores_csv(outcome.report, paths.scores_csv);
  if (!paths.curve_csv.empty()) write_report_curve_csv(outcome.report, paths.curve_csv);
  if (!paths.histogram_json.empty())
    write_report_histogram_json(outcome.report, paths.histogram_json);
  if (!paths.model_stem.empty())
    dump_model_csv(outcome.model, paths.model_stem + "_neurons.csv", paths.model_stem + "_edges.csv");
}

void write_report_scores_csv(const PipelineReport& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");
  f.precision(17);
  f << "index,lambda,dbi2,dbi3,dbi4,r,chosen\n";
  for (const EigenScore& s : report.scores) {
    const bool chosen = std::find(report.chosen_indices.begin(), report.chosen_indices.end(),
                                  s.index) != report.chosen_indices.end();
    f << s.index << "," << s.lambda << "," << s.dbi2 << "," << s.dbi3 << "," << s.dbi4 << ","
      << s.r << "," << (chosen ? 1 : 0) << "\n";
  }
}

void write_report_curve_csv(const PipelineReport& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");
  f.precision(17);
  f << "k,dbi,lambda_sum,r\n";
  for (const KSelectionEntry& e : report.k_curve.entries)
    f << e.k << "," << e.dbi << "," << e.lambda_sum << "," << e.r << "\n";
}

void write_report_histogram_json(const PipelineReport& report, const std::string& path) {
  json j{{"bin_edges", report.histogram.bin_edges},
         {"counts", report.histogram.counts},
         {"mu", report.histogram.mu},
         {"sigma", report.histogram.sigma},
         {"bin_width", report.histogram.bin_width}};
  ensure_finite(j, "histogram");
  write_text_file(path, j.dump(2));
}

}  // namespace asc
