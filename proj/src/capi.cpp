#include "asc.h"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "asc/eval_metrics.hpp"
#include "asc/image.hpp"
#include "asc/pipeline.hpp"
#include "asc/synthetic.hpp"

using nlohmann::json;

struct asc_config {
  asc::RunConfig cfg;
};

struct asc_result {
  std::vector<int> labels;
  int width = 0;   // 0 for point runs
  int height = 0;
  int chosen_k = 0;
  std::string report_json;
};

namespace {

thread_local std::string t_last_error;
thread_local std::string t_last_stage;

int to_code(asc::Status s) {
  switch (s) {
    case asc::Status::ok: return ASC_OK;
    case asc::Status::invalid_argument: return ASC_ERR_INVALID_ARGUMENT;
    case asc::Status::dimension_mismatch: return ASC_ERR_DIMENSION_MISMATCH;
    case asc::Status::io_error: return ASC_ERR_IO;
    case asc::Status::parse_error: return ASC_ERR_PARSE;
    case asc::Status::numeric_error: return ASC_ERR_NUMERIC;
  }
  return ASC_ERR_INTERNAL;
}

template <class F>
int guarded(F&& fn) {
  try {
    fn();
    t_last_error.clear();
    t_last_stage.clear();
    return ASC_OK;
  } catch (const asc::Error& e) {
    t_last_error = e.what();
    t_last_stage = e.stage();
    return to_code(e.status());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    t_last_stage.clear();
    return ASC_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    t_last_stage.clear();
    return ASC_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw asc::Error(asc::Status::invalid_argument, what);
}

asc_result* make_result(asc::ClusterOutcome&& outcome) {
  auto* r = new asc_result;
  r->labels = std::move(outcome.point_labels);
  r->chosen_k = outcome.report.chosen_k;
  r->report_json = outcome.report.to_json_string();
  return r;
}

asc_result* make_result(asc::SegmentOutcome&& outcome) {
  auto* r = new asc_result;
  r->labels = std::move(outcome.labels.labels);
  r->width = outcome.labels.width;
  r->height = outcome.labels.height;
  r->chosen_k = outcome.report.chosen_k;
  r->report_json = outcome.report.to_json_string();
  return r;
}

asc::LabelImage load_label_image(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".png" || ext == ".ppm" || ext == ".pnm")
    return asc::label_image_from_colors(asc::read_image(path));
  return asc::read_label_csv(path);
}

json evaluate_to_json(const std::vector<int>& pred, const std::vector<int>& gt,
                      const std::string& metrics_csv) {
  if (pred.size() != gt.size())
    throw asc::Error(asc::Status::dimension_mismatch,
                     "labelings have different sizes (" + std::to_string(pred.size()) + " vs " +
                         std::to_string(gt.size()) + ")");

  std::vector<std::string> wanted;
  if (!metrics_csv.empty()) {
    std::string token;
    for (char c : metrics_csv + ",") {
      if (c == ',') {
        if (!token.empty()) wanted.push_back(token);
        token.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        token.push_back(c);
      }
    }
  }
  auto selected = [&](const char* name) {
    if (wanted.empty()) return true;
    for (const std::string& w : wanted)
      if (w == name) return true;
    return false;
  };
  for (const std::string& w : wanted) {
    if (w != "f" && w != "covering" && w != "pri" && w != "vi" && w != "accuracy")
      throw asc::Error(asc::Status::invalid_argument,
                       "unknown metric '" + w + "' (f|covering|pri|vi|accuracy)");
  }

  std::vector<int> gt_distinct(gt);
  std::sort(gt_distinct.begin(), gt_distinct.end());
  gt_distinct.erase(std::unique(gt_distinct.begin(), gt_distinct.end()), gt_distinct.end());
  const bool gt_binary = gt_distinct.size() == 2;

  json out{{"count", pred.size()}};
  if (selected("covering")) out["covering"] = asc::segmentation_covering(pred, gt);
  if (selected("pri")) out["pri"] = asc::pri(pred, gt);
  if (selected("vi")) out["vi"] = asc::vi(pred, gt);
  if (selected("accuracy")) out["accuracy"] = asc::clustering_accuracy(pred, gt);
  if (selected("f")) {
    const bool explicit_f =
        std::find(wanted.begin(), wanted.end(), "f") != wanted.end();
    if (gt_binary) {
      // foreground = the larger label id (images: brighter color)
      const int fg = gt_distinct.back();
      std::vector<int> mask(gt.size());
      for (std::size_t i = 0; i < gt.size(); ++i) mask[i] = gt[i] == fg ? 1 : 0;
      out["f_measure"] = asc::f_measure_foreground(pred, mask);
    } else if (explicit_f) {
      throw asc::Error(asc::Status::invalid_argument,
                       "f-measure needs a binary ground truth (got " +
                           std::to_string(gt_distinct.size()) + " labels)");
    }
  }
  return out;
}

}  // namespace

extern "C" {

const char* asc_version(void) { return "1.0.0"; }

const char* asc_status_name(int code) {
  switch (code) {
    case ASC_OK: return "ok";
    case ASC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ASC_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case ASC_ERR_IO: return "io_error";
    case ASC_ERR_PARSE: return "parse_error";
    case ASC_ERR_NUMERIC: return "numeric_error";
    case ASC_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* asc_last_error(void) { return t_last_error.c_str(); }
const char* asc_last_error_stage(void) { return t_last_stage.c_str(); }

asc_config* asc_config_create(void) { return new asc_config; }

void asc_config_destroy(asc_config* config) { delete config; }

int asc_config_update(asc_config* config, const char* json_text) {
  return guarded([&] {
    require(config != nullptr, "config is null");
    require(json_text != nullptr, "json_text is null");
    // merge: serialize current, patch with the incoming fields, re-parse
    json current = json::parse(config->cfg.to_json_string());
    json patch = json::parse(json_text, nullptr, false);
    if (patch.is_discarded() || !patch.is_object())
      throw asc::Error(asc::Status::parse_error, "config update must be a JSON object");
    current.merge_patch(patch);
    config->cfg = asc::RunConfig::from_json_string(current.dump());
  });
}

int asc_config_to_json(const asc_config* config, char** out_json) {
  return guarded([&] {
    require(config != nullptr, "config is null");
    require(out_json != nullptr, "out_json is null");
    *out_json = copy_string(config->cfg.to_json_string(2));
  });
}

void asc_string_free(char* text) { delete[] text; }

int asc_generate_points(const char* kind, const char* params_json, int64_t seed,
                        const char* out_csv_path) {
  return guarded([&] {
    require(kind != nullptr, "kind is null");
    require(out_csv_path != nullptr, "out_csv_path is null");
    const asc::PointSet points = asc::generate_synthetic(
        kind, params_json ? params_json : "", static_cast<std::uint64_t>(seed));
    asc::write_points_csv(points, out_csv_path);
  });
}

int asc_cluster_points_file(const char* points_csv_path, const asc_config* config,
                            asc_result** out_result) {
  return guarded([&] {
    require(points_csv_path != nullptr, "points_csv_path is null");
    require(config != nullptr, "config is null");
    require(out_result != nullptr, "out_result is null");
    const asc::PointSet points = asc::read_points_csv(points_csv_path, config->cfg.label_column);
    *out_result = make_result(asc::cluster_points(points.points, config->cfg));
  });
}

int asc_cluster_points(const double* points, size_t count, size_t dim, const asc_config* config,
                       asc_result** out_result) {
  return guarded([&] {
    require(points != nullptr, "points is null");
    require(config != nullptr, "config is null");
    require(out_result != nullptr, "out_result is null");
    require(count > 0 && dim > 0, "count and dim must be positive");
    asc::Matrix m(count, dim);
    for (size_t i = 0; i < count; ++i)
      for (size_t d = 0; d < dim; ++d) m(i, d) = points[i * dim + d];
    *out_result = make_result(asc::cluster_points(m, config->cfg));
  });
}

int asc_segment_image_file(const char* image_path, const asc_config* config,
                           asc_result** out_result) {
  return guarded([&] {
    require(image_path != nullptr, "image_path is null");
    require(config != nullptr, "config is null");
    require(out_result != nullptr, "out_result is null");
    const asc::Image image = asc::read_image(image_path);
    *out_result = make_result(asc::segment_image(image, config->cfg));
  });
}

void asc_result_destroy(asc_result* result) { delete result; }

int asc_result_report_json(const asc_result* result, char** out_json) {
  return guarded([&] {
    require(result != nullptr, "result is null");
    require(out_json != nullptr, "out_json is null");
    *out_json = copy_string(result->report_json);
  });
}

int asc_result_chosen_k(const asc_result* result) { return result ? result->chosen_k : -1; }

size_t asc_result_label_count(const asc_result* result) {
  return result ? result->labels.size() : 0;
}

int asc_result_copy_labels(const asc_result* result, int32_t* out, size_t capacity) {
  return guarded([&] {
    require(result != nullptr, "result is null");
    require(out != nullptr, "out is null");
    require(capacity >= result->labels.size(), "capacity too small");
    for (size_t i = 0; i < result->labels.size(); ++i)
      out[i] = static_cast<int32_t>(result->labels[i]);
  });
}

int asc_result_image_size(const asc_result* result, int32_t* out_width, int32_t* out_height) {
  return guarded([&] {
    require(result != nullptr, "result is null");
    require(out_width != nullptr && out_height != nullptr, "out pointers are null");
    *out_width = result->width;
    *out_height = result->height;
  });
}

int asc_evaluate_files(const char* pred_path, const char* gt_path, const char* metrics_csv,
                       char** out_json) {
  return guarded([&] {
    require(pred_path != nullptr, "pred_path is null");
    require(gt_path != nullptr, "gt_path is null");
    require(out_json != nullptr, "out_json is null");
    const asc::LabelImage pred = load_label_image(pred_path);
    const asc::LabelImage gt = load_label_image(gt_path);
    if (pred.width != gt.width || pred.height != gt.height)
      throw asc::Error(asc::Status::dimension_mismatch,
                       "label dimensions differ: " + std::to_string(pred.width) + "x" +
                           std::to_string(pred.height) + " vs " + std::to_string(gt.width) + "x" +
                           std::to_string(gt.height));
    json j = evaluate_to_json(pred.labels, gt.labels, metrics_csv ? metrics_csv : "");
    j["pred"] = pred_path;
    j["gt"] = gt_path;
    *out_json = copy_string(j.dump(2));
  });
}

int asc_evaluate_labels(const int32_t* pred, const int32_t* gt, size_t count,
                        const char* metrics_csv, char** out_json) {
  return guarded([&] {
    require(pred != nullptr && gt != nullptr, "label arrays are null");
    require(out_json != nullptr, "out_json is null");
    require(count > 0, "count must be positive");
    std::vector<int> p(pred, pred + count), g(gt, gt + count);
    *out_json = copy_string(evaluate_to_json(p, g, metrics_csv ? metrics_csv : "").dump(2));
  });
}

int asc_sweep_points_file(const char* points_csv_path, const asc_config* config, int64_t base_seed,
                          int runs, int jobs, char** out_json) {
  return guarded([&] {
    require(points_csv_path != nullptr, "points_csv_path is null");
    require(config != nullptr, "config is null");
    require(out_json != nullptr, "out_json is null");
    const asc::PointSet points = asc::read_points_csv(points_csv_path, config->cfg.label_column);
    *out_json = copy_string(
        asc::sweep_points(points.points, points.labels, config->cfg, base_seed, runs, jobs));
  });
}

}  // extern "C"
