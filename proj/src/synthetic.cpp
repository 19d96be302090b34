#include "asc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace asc {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

template <class T>
std::vector<T> broadcast(const json& node, const char* scalar_key, const char* list_key,
                         std::size_t n, T fallback) {
  std::vector<T> out(n, fallback);
  if (node.contains(scalar_key)) out.assign(n, node.at(scalar_key).get<T>());
  if (node.contains(list_key)) {
    const auto list = node.at(list_key).get<std::vector<T>>();
    if (list.size() != n)
      throw Error(Status::invalid_argument,
                  std::string(list_key) + " must have one entry per group");
    out = list;
  }
  return out;
}

}  // namespace

PointSet gen_rings(const std::vector<RingSpec>& rings, std::uint64_t seed) {
  if (rings.empty()) throw Error(Status::invalid_argument, "gen_rings needs at least one ring");
  std::size_t total = 0;
  for (const RingSpec& r : rings) {
    if (r.count <= 0) throw Error(Status::invalid_argument, "ring counts must be positive");
    if (!(r.radius > 0.0)) throw Error(Status::invalid_argument, "ring radii must be positive");
    if (r.width < 0.0) throw Error(Status::invalid_argument, "ring widths must be non-negative");
    total += static_cast<std::size_t>(r.count);
  }

  Rng rng(seed);
  PointSet out;
  out.points = Matrix(total, 2);
  out.labels.resize(total);
  std::size_t row = 0;
  for (std::size_t ring = 0; ring < rings.size(); ++ring) {
    const RingSpec& spec = rings[ring];
    for (int i = 0; i < spec.count; ++i, ++row) {
      const double angle = kTwoPi * rng.next_double();
      const double radius = spec.radius + (rng.next_double() - 0.5) * spec.width;
      out.points(row, 0) = radius * std::cos(angle);
      out.points(row, 1) = radius * std::sin(angle);
      out.labels[row] = static_cast<int>(ring);
    }
  }
  return out;
}

PointSet gen_blobs(const std::vector<BlobSpec>& blobs, std::uint64_t seed) {
  if (blobs.empty()) throw Error(Status::invalid_argument, "gen_blobs needs at least one blob");
  const std::size_t dim = blobs.front().center.size();
  if (dim == 0) throw Error(Status::invalid_argument, "blob centers need at least 1 dimension");
  std::size_t total = 0;
  for (const BlobSpec& b : blobs) {
    if (b.count <= 0) throw Error(Status::invalid_argument, "blob counts must be positive");
    if (!(b.sigma > 0.0)) throw Error(Status::invalid_argument, "blob sigmas must be positive");
    if (b.center.size() != dim)
      throw Error(Status::dimension_mismatch, "blob centers must share one dimension");
    total += static_cast<std::size_t>(b.count);
  }

  Rng rng(seed);
  PointSet out;
  out.points = Matrix(total, dim);
  out.labels.resize(total);
  std::size_t row = 0;
  for (std::size_t blob = 0; blob < blobs.size(); ++blob) {
    const BlobSpec& spec = blobs[blob];
    for (int i = 0; i < spec.count; ++i, ++row) {
      for (std::size_t d = 0; d < dim; ++d)
        out.points(row, d) = spec.center[d] + spec.sigma * rng.next_normal();
      out.labels[row] = static_cast<int>(blob);
    }
  }
  return out;
}

PointSet gen_rings_with_noise(const std::vector<RingSpec>& rings, int noise_count,
                              std::uint64_t seed) {
  if (noise_count < 0) throw Error(Status::invalid_argument, "noise count must be non-negative");
  PointSet base = gen_rings(rings, seed);

  double extent = 0.0;
  for (const RingSpec& r : rings) extent = std::max(extent, r.radius + 0.5 * r.width);

  Rng rng = Rng::stream(seed, 0x6e6f697365ULL);  // separate noise stream
  const std::size_t n = base.points.rows();
  PointSet out;
  out.points = Matrix(n + static_cast<std::size_t>(noise_count), 2);
  out.labels.resize(n + static_cast<std::size_t>(noise_count));
  for (std::size_t i = 0; i < n; ++i) {
    out.points(i, 0) = base.points(i, 0);
    out.points(i, 1) = base.points(i, 1);
    out.labels[i] = base.labels[i];
  }
  for (int i = 0; i < noise_count; ++i) {
    const std::size_t row = n + static_cast<std::size_t>(i);
    out.points(row, 0) = (rng.next_double() * 2.0 - 1.0) * extent;
    out.points(row, 1) = (rng.next_double() * 2.0 - 1.0) * extent;
    out.labels[row] = static_cast<int>(rings.size());
  }
  return out;
}

PointSet generate_synthetic(const std::string& kind, const std::string& params_json,
                            std::uint64_t seed) {
  json params = json::object();
  if (!params_json.empty()) {
    params = json::parse(params_json, nullptr, false);
    if (params.is_discarded() || !params.is_object())
      throw Error(Status::parse_error, "synthetic parameters must be a JSON object");
  }

  try {
    if (kind == "rings" || kind == "rings_with_noise") {
      const auto radii = params.value("radii", std::vector<double>{1.0, 3.0, 5.0});
      const auto widths = broadcast<double>(params, "width", "widths", radii.size(), 0.2);
      const auto counts = broadcast<int>(params, "count", "counts", radii.size(), 300);
      std::vector<RingSpec> rings(radii.size());
      for (std::size_t i = 0; i < radii.size(); ++i)
        rings[i] = {radii[i], widths[i], counts[i]};
      if (kind == "rings") return gen_rings(rings, seed);
      return gen_rings_with_noise(rings, params.value("noise_count", 90), seed);
    }
    if (kind == "blobs") {
      const auto centers = params.value(
          "centers", std::vector<std::vector<double>>{{0.0, 0.0}, {6.0, 6.0}, {-6.0, 6.0}});
      const auto sigmas = broadcast<double>(params, "sigma", "sigmas", centers.size(), 0.5);
      const auto counts = broadcast<int>(params, "count", "counts", centers.size(), 200);
      std::vector<BlobSpec> blobs(centers.size());
      for (std::size_t i = 0; i < centers.size(); ++i)
        blobs[i] = {centers[i], sigmas[i], counts[i]};
      return gen_blobs(blobs, seed);
    }
  } catch (const json::exception& e) {
    throw Error(Status::parse_error, std::string("bad synthetic parameters: ") + e.what());
  }
  throw Error(Status::invalid_argument,
              "unknown synthetic kind '" + kind + "' (rings|blobs|rings_with_noise)");
}

void write_points_csv(const PointSet& points, const std::string& path, bool header) {
  std::ofstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");
  f.precision(17);
  const bool labeled = !points.labels.empty();
  if (header) {
    for (std::size_t d = 0; d < points.points.cols(); ++d) {
      if (d) f << ",";
      f << "x" << d;
    }
    if (labeled) f << ",label";
    f << "\n";
  }
  for (std::size_t i = 0; i < points.points.rows(); ++i) {
    for (std::size_t d = 0; d < points.points.cols(); ++d) {
      if (d) f << ",";
      f << points.points(i, d);
    }
    if (labeled) f << "," << points.labels[i];
    f << "\n";
  }
}

PointSet read_points_csv(const std::string& path, LabelColumn label_column) {
  std::ifstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first_data_line = true;
  std::size_t width = 0;

  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(std::remove_if(trimmed.begin(), trimmed.end(),
                                 [](unsigned char c) { return std::isspace(c); }),
                  trimmed.end());
    if (trimmed.empty()) continue;

    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool parse_failed = false;
    std::string bad_cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        if (!std::isfinite(v)) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        parse_failed = true;
        bad_cell = cell;
        break;
      }
    }

    if (parse_failed) {
      if (first_data_line) continue;  // header row
      throw Error(Status::parse_error,
                  path + ": line " + std::to_string(lineno) + ": '" + bad_cell +
                      "' is not a number");
    }
    if (row.empty()) continue;
    if (first_data_line) {
      width = row.size();
      first_data_line = false;
    } else if (row.size() != width) {
      throw Error(Status::parse_error, path + ": line " + std::to_string(lineno) + ": expected " +
                                           std::to_string(width) + " columns, got " +
                                           std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(Status::parse_error, path + ": no data rows found");

  bool use_labels = false;
  if (label_column == LabelColumn::last) {
    if (width < 2) throw Error(Status::parse_error, path + ": no label column available");
    use_labels = true;
  } else if (label_column == LabelColumn::automatic && width >= 2) {
    use_labels = std::all_of(rows.begin(), rows.end(), [](const std::vector<double>& r) {
      const double v = r.back();
      return v == std::floor(v) && std::abs(v) < 2147483647.0;
    });
  }

  PointSet out;
  const std::size_t dim = use_labels ? width - 1 : width;
  out.points = Matrix(rows.size(), dim);
  if (use_labels) out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t d = 0; d < dim; ++d) out.points(i, d) = rows[i][d];
    if (use_labels) out.labels[i] = static_cast<int>(rows[i].back());
  }
  return out;
}

}  // namespace asc
