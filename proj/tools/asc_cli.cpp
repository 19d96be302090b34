// Command-line front end for the asc shared library. Talks to the library
// exclusively through the C interface in asc.h.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asc.h"

namespace {

using nlohmann::json;

int exit_code_for(int status) {
  switch (status) {
    case ASC_OK: return 0;
    case ASC_ERR_IO:
    case ASC_ERR_PARSE: return 2;
    case ASC_ERR_DIMENSION_MISMATCH: return 3;
    default: return 1;
  }
}

int report_failure(int status) {
  const char* stage = asc_last_error_stage();
  std::cerr << "error";
  if (stage && *stage) std::cerr << " [" << stage << "]";
  std::cerr << ": " << asc_last_error() << "\n";
  return exit_code_for(status);
}

struct ConfigHandle {
  asc_config* ptr = asc_config_create();
  ~ConfigHandle() { asc_config_destroy(ptr); }
};

struct ResultHandle {
  asc_result* ptr = nullptr;
  ~ResultHandle() { asc_result_destroy(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { asc_string_free(ptr); }
};

/// Collects config fields from flags; only flags the user passed are applied,
/// so file-loaded settings survive unless overridden.
struct ConfigFlags {
  std::string config_file;
  json patch = json::object();
  json gng = json::object();
  json outputs = json::object();

  int apply(asc_config* config) {
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      if (!f) {
        std::cerr << "error: cannot open config file " << config_file << "\n";
        return 2;
      }
      std::stringstream ss;
      ss << f.rdbuf();
      const int rc = asc_config_update(config, ss.str().c_str());
      if (rc != ASC_OK) return report_failure(rc);
    }
    if (!gng.empty()) patch["gng"] = gng;
    if (!outputs.empty()) patch["outputs"] = outputs;
    if (!patch.empty()) {
      const int rc = asc_config_update(config, patch.dump().c_str());
      if (rc != ASC_OK) return report_failure(rc);
    }
    return 0;
  }
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags, bool image_flags, bool with_seed = true) {
  cmd->add_option("--config", flags.config_file, "JSON config file (flags override its fields)");

  auto opt = [&](const char* name, const char* key, const char* help) {
    cmd->add_option_function<double>(
        name, [&flags, key = std::string(key)](double v) { flags.patch[key] = v; }, help);
  };
  auto opt_int = [&](const char* name, const char* key, const char* help) {
    cmd->add_option_function<std::int64_t>(
        name, [&flags, key = std::string(key)](std::int64_t v) { flags.patch[key] = v; }, help);
  };
  auto opt_gng = [&](const char* name, const char* key, const char* help) {
    cmd->add_option_function<double>(
        name, [&flags, key = std::string(key)](double v) { flags.gng[key] = v; }, help);
  };
  auto out_path = [&](const char* name, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        name, [&flags, key = std::string(key)](const std::string& v) { flags.outputs[key] = v; },
        help);
  };

  if (with_seed) opt_int("--seed", "seed", "random seed (default 0)");
  opt_int("--m", "m", "representative count; 0 = auto (elbow for points, 100 for images)");
  cmd->add_option_function<std::vector<int>>(
      "--elbow-candidates",
      [&flags](const std::vector<int>& v) { flags.patch["elbow_candidates"] = v; },
      "candidate representative counts for the elbow rule")
      ->delimiter(',');
  opt_int("--scale-k", "scale_neighbor_k", "neighbor rank for local kernel scales (default 1)");
  opt("--variance-threshold", "variance_threshold",
      "explained-variance fraction kept in the refined embedding (default 0.8)");
  opt_int("--k-max", "k_max", "largest cluster count examined; 0 = min(m, 50)");
  cmd->add_option_function<std::string>(
      "--feature-mode",
      [&flags](const std::string& v) { flags.patch["feature_mode"] = v; },
      "pixel features: rgb or rgbxy");
  opt_gng("--eps-b", "eps_b", "winner learning rate (default 0.05)");
  opt_gng("--eps-n", "eps_n", "neighbor learning rate (default 0.02)");
  cmd->add_option_function<std::int64_t>(
      "--insert-interval",
      [&flags](std::int64_t v) { flags.gng["insert_interval"] = v; },
      "signals between neuron insertions (default 100)");
  cmd->add_option_function<std::int64_t>(
      "--max-age", [&flags](std::int64_t v) { flags.gng["max_age"] = v; },
      "edge age limit (default 20)");
  opt_gng("--alpha", "error_split_alpha", "error scaling at insertion (default 0.5)");
  opt_gng("--beta", "error_decay_beta", "per-pass error decay (default 0.995)");
  opt_gng("--stability-tol", "stability_tol", "quantization-error stability bound (default 1e-3)");
  cmd->add_option_function<std::int64_t>(
      "--max-epochs", [&flags](std::int64_t v) { flags.gng["max_epochs"] = v; },
      "training pass cap (default 200)");
  opt_int("--kmeans-restarts", "kmeans_restarts", "k-means restarts (default 10)");
  opt_int("--kmeans-max-iters", "kmeans_max_iterations", "k-means iteration cap (default 300)");
  cmd->add_flag_function(
      "--refine-components",
      [&flags](std::int64_t) { flags.patch["refine_use_components"] = true; },
      "use principal-component projections instead of original eigenvectors");
  cmd->add_option_function<std::string>(
      "--label-column", [&flags](const std::string& v) { flags.patch["label_column"] = v; },
      "CSV label column handling: auto|none|last");
  cmd->add_flag_function(
      "--no-timings", [&flags](std::int64_t) { flags.patch["emit_timings"] = false; },
      "omit timings from reports (byte-identical reruns)");

  out_path("--report", "report_json", "write the run report JSON here");
  out_path("--labels", "labels_csv", "write per-point/per-pixel labels CSV here");
  out_path("--neuron-labels", "neuron_labels_csv", "write per-neuron labels here");
  out_path("--scores", "scores_csv", "write the eigenvector score table here");
  out_path("--curve", "curve_csv", "write the cluster-count curve here");
  out_path("--histogram", "histogram_json", "write relevance histogram data here");
  out_path("--affinity", "affinity_csv", "dump the affinity matrix here");
  out_path("--laplacian", "laplacian_csv", "dump the Laplacian here");
  out_path("--model-dump", "model_stem", "dump neurons/edges CSVs with this stem");

  if (image_flags) {
    cmd->add_flag_function(
        "--no-median-filter", [&flags](std::int64_t) { flags.patch["median_filter"] = false; },
        "skip the 3x3 majority smoothing");
    cmd->add_option_function<std::int64_t>(
        "--train-pixel-cap", [&flags](std::int64_t v) { flags.patch["train_pixel_cap"] = v; },
        "training-signal cap for large images; 0 trains on every pixel");
  }
  out_path("--label-png", "label_png", "write the indexed label image here");
}

int run_gen(const std::string& kind, const std::string& params, std::int64_t seed,
            const std::string& out_path) {
  const int rc = asc_generate_points(kind.c_str(), params.empty() ? nullptr : params.c_str(), seed,
                                     out_path.c_str());
  if (rc != ASC_OK) return report_failure(rc);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_cluster(const std::string& points_path, ConfigFlags& flags) {
  ConfigHandle config;
  if (const int rc = flags.apply(config.ptr); rc != 0) return rc;
  ResultHandle result;
  const int rc = asc_cluster_points_file(points_path.c_str(), config.ptr, &result.ptr);
  if (rc != ASC_OK) return report_failure(rc);

  StringHandle report;
  if (asc_result_report_json(result.ptr, &report.ptr) == ASC_OK) {
    const json j = json::parse(report.ptr);
    std::cout << "points: " << j["input_count"] << "  m: " << j["m"]["used"]
              << "  eigenvectors: " << j["eigenvector_selection"]["chosen_indices"].size()
              << "  chosen_k: " << j["k_selection"]["chosen_k"] << "\n";
  }
  return 0;
}

int run_segment(const std::string& image_path, ConfigFlags& flags) {
  ConfigHandle config;
  if (const int rc = flags.apply(config.ptr); rc != 0) return rc;
  ResultHandle result;
  const int rc = asc_segment_image_file(image_path.c_str(), config.ptr, &result.ptr);
  if (rc != ASC_OK) return report_failure(rc);

  int32_t w = 0, h = 0;
  asc_result_image_size(result.ptr, &w, &h);
  std::cout << "segmented " << image_path << " (" << w << "x" << h
            << "), chosen_k: " << asc_result_chosen_k(result.ptr) << "\n";
  return 0;
}

int eval_one(const std::string& pred, const std::string& gt, const std::string& metrics,
             json& out) {
  StringHandle text;
  const int rc =
      asc_evaluate_files(pred.c_str(), gt.c_str(), metrics.empty() ? nullptr : metrics.c_str(),
                         &text.ptr);
  if (rc != ASC_OK) return rc;
  out = json::parse(text.ptr);
  return ASC_OK;
}

int run_eval(const std::string& pred, const std::string& gt, const std::string& batch_file,
             const std::string& metrics, const std::string& out_path, int jobs) {
  json document;
  if (batch_file.empty()) {
    const int rc = eval_one(pred, gt, metrics, document);
    if (rc != ASC_OK) return report_failure(rc);
  } else {
    std::ifstream f(batch_file);
    if (!f) {
      std::cerr << "error: cannot open batch file " << batch_file << "\n";
      return 2;
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        std::cerr << "error: " << batch_file << ": line " << lineno
                  << ": expected 'pred,gt'\n";
        return 2;
      }
      pairs.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    if (pairs.empty()) {
      std::cerr << "error: " << batch_file << " lists no pairs\n";
      return 2;
    }

    std::vector<json> rows(pairs.size());
    std::vector<int> codes(pairs.size(), ASC_OK);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= pairs.size()) return;
        codes[i] = eval_one(pairs[i].first, pairs[i].second, metrics, rows[i]);
      }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(pairs.size())));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (codes[i] != ASC_OK) {
        std::cerr << "error evaluating " << pairs[i].first << " vs " << pairs[i].second << "\n";
        return report_failure(codes[i]);
      }
    }

    json aggregate = json::object();
    for (const char* key : {"covering", "pri", "vi", "accuracy", "f_measure"}) {
      double sum = 0.0;
      int n = 0;
      for (const json& row : rows) {
        if (row.contains(key)) {
          sum += row[key].get<double>();
          ++n;
        }
      }
      if (n > 0) aggregate[key] = sum / n;
    }
    document = json{{"pairs", rows}, {"aggregate", aggregate}};
  }

  const std::string text = document.dump(2);
  std::cout << text << "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot open " << out_path << " for writing\n";
      return 2;
    }
    f << text << "\n";
  }
  return 0;
}

int run_sweep(const std::string& points_path, ConfigFlags& flags, std::int64_t base_seed, int runs,
              int jobs, const std::string& out_path) {
  ConfigHandle config;
  if (const int rc = flags.apply(config.ptr); rc != 0) return rc;
  StringHandle text;
  const int rc =
      asc_sweep_points_file(points_path.c_str(), config.ptr, base_seed, runs, jobs, &text.ptr);
  if (rc != ASC_OK) return report_failure(rc);

  const json j = json::parse(text.ptr);
  std::cout << "runs: " << j["runs"] << "  chosen_k counts: " << j["chosen_k_counts"].dump();
  if (j.contains("accuracy")) std::cout << "  mean accuracy: " << j["accuracy"]["mean"];
  std::cout << "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot open " << out_path << " for writing\n";
      return 2;
    }
    f << text.ptr << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate spectral clustering with growing-neural-gas graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(asc_version()));

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic labeled point set");
  std::string gen_kind = "rings", gen_params, gen_out = "points.csv";
  std::int64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind, "rings | blobs | rings_with_noise");
  gen->add_option("--params", gen_params, "generator parameters as a JSON object");
  gen->add_option("--seed", gen_seed, "random seed (default 0)");
  gen->add_option("-o,--out", gen_out, "output CSV path");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "cluster a CSV of points");
  std::string cluster_points;
  cluster->add_option("points", cluster_points, "input CSV (x,y,...; optional label column)")
      ->required();
  ConfigFlags cluster_flags;
  add_config_flags(cluster, cluster_flags, false);

  // segment
  auto* segment = app.add_subcommand("segment", "segment a PNG or PPM image");
  std::string segment_image_path;
  segment->add_option("image", segment_image_path, "input image (PNG or binary PPM)")->required();
  ConfigFlags segment_flags;
  add_config_flags(segment, segment_flags, true);

  // eval
  auto* eval = app.add_subcommand("eval", "score a predicted labeling against ground truth");
  std::string eval_pred, eval_gt, eval_batch, eval_metrics, eval_out;
  int eval_jobs = 1;
  eval->add_option("pred", eval_pred, "predicted labels (.csv grid or image)");
  eval->add_option("gt", eval_gt, "ground-truth labels (.csv grid or image)");
  eval->add_option("--batch", eval_batch, "file of 'pred,gt' lines evaluated together");
  eval->add_option("--metrics", eval_metrics, "comma list from f,covering,pri,vi,accuracy");
  eval->add_option("-o,--out", eval_out, "also write the JSON here");
  eval->add_option("--jobs", eval_jobs, "parallel evaluations in batch mode");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run the point pipeline across consecutive seeds");
  std::string sweep_points_path, sweep_out;
  std::int64_t sweep_seed = 0;
  int sweep_runs = 100, sweep_jobs = 1;
  sweep->add_option("points", sweep_points_path, "input CSV")->required();
  sweep->add_option("--seed", sweep_seed, "base seed")->required();
  sweep->add_option("--runs", sweep_runs, "number of consecutive seeds");
  sweep->add_option("--jobs", sweep_jobs, "parallel runs");
  sweep->add_option("-o,--out", sweep_out, "write the aggregate JSON here");
  ConfigFlags sweep_flags;
  add_config_flags(sweep, sweep_flags, false, false);

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) return run_gen(gen_kind, gen_params, gen_seed, gen_out);
  if (cluster->parsed()) return run_cluster(cluster_points, cluster_flags);
  if (segment->parsed()) return run_segment(segment_image_path, segment_flags);
  if (eval->parsed()) {
    if (eval_batch.empty() && (eval_pred.empty() || eval_gt.empty())) {
      std::cerr << "error: eval needs 'pred gt' arguments or --batch\n";
      return 2;
    }
    return run_eval(eval_pred, eval_gt, eval_batch, eval_metrics, eval_out, eval_jobs);
  }
  if (sweep->parsed())
    return run_sweep(sweep_points_path, sweep_flags, sweep_seed, sweep_runs, sweep_jobs, sweep_out);
  return 1;
}
