#include "asc/embed_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace asc {

namespace {

constexpr double kDbiSentinel = 1e6;
constexpr double kCentroidDistanceFloor = 1e-30;

std::size_t count_distinct_rows(const Matrix& x) {
  std::vector<std::size_t> idx(x.rows());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(x.row_ptr(a), x.row_ptr(a) + x.cols(), x.row_ptr(b),
                                        x.row_ptr(b) + x.cols());
  });
  std::size_t distinct = x.rows() == 0 ? 0 : 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (!std::equal(x.row_ptr(idx[i]), x.row_ptr(idx[i]) + x.cols(), x.row_ptr(idx[i - 1])))
      ++distinct;
  }
  return distinct;
}

Matrix seed_plus_plus(const Matrix& x, int k, Rng& rng) {
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  Matrix centroids(static_cast<std::size_t>(k), dim);

  std::size_t first = rng.next_index(n);
  for (std::size_t d = 0; d < dim; ++d) centroids(0, d) = x(first, d);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i)
    d2[i] = squared_distance(x.row_ptr(i), centroids.row_ptr(0), dim);

  for (int c = 1; c < k; ++c) {
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick;
    if (total <= 0.0) {
      pick = rng.next_index(n);
    } else {
      const double r = rng.next_double() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > r) {
          pick = i;
          break;
        }
      }
    }
    for (std::size_t d = 0; d < dim; ++d) centroids(static_cast<std::size_t>(c), d) = x(pick, d);
    for (std::size_t i = 0; i < n; ++i) {
      const double dist = squared_distance(x.row_ptr(i), centroids.row_ptr(static_cast<std::size_t>(c)), dim);
      d2[i] = std::min(d2[i], dist);
    }
  }
  return centroids;
}

struct LloydRun {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

LloydRun lloyd(const Matrix& x, int k, Rng rng, int max_iterations) {
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  const std::size_t ku = static_cast<std::size_t>(k);

  LloydRun run;
  run.centroids = seed_plus_plus(x, k, rng);
  run.labels.assign(n, -1);

  std::vector<double> best_d2(n, 0.0);
  std::vector<std::size_t> sizes(ku, 0);

  for (int iter = 1; iter <= max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < ku; ++c) {
        const double d = squared_distance(x.row_ptr(i), run.centroids.row_ptr(c), dim);
        if (d < best) {
          best = d;
          arg = static_cast<int>(c);
        }
      }
      if (run.labels[i] != arg) {
        run.labels[i] = arg;
        changed = true;
      }
      best_d2[i] = best;
    }

    std::fill(sizes.begin(), sizes.end(), 0);
    for (int l : run.labels) ++sizes[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < ku; ++c) {
      if (sizes[c] != 0) continue;
      // hand the empty cluster the point farthest from its current centroid
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(run.labels[i])] <= 1) continue;
        if (best_d2[i] > far_d) {
          far_d = best_d2[i];
          far = i;
        }
      }
      --sizes[static_cast<std::size_t>(run.labels[far])];
      run.labels[far] = static_cast<int>(c);
      sizes[c] = 1;
      best_d2[far] = 0.0;
      changed = true;
    }

    Matrix sums(ku, dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = static_cast<std::size_t>(run.labels[i]);
      for (std::size_t d = 0; d < dim; ++d) sums(c, d) += x(i, d);
    }
    for (std::size_t c = 0; c < ku; ++c)
      for (std::size_t d = 0; d < dim; ++d)
        run.centroids(c, d) = sums(c, d) / static_cast<double>(sizes[c]);

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      inertia += squared_distance(x.row_ptr(i), run.centroids.row_ptr(static_cast<std::size_t>(run.labels[i])), dim);
    run.history.push_back(inertia);
    run.inertia = inertia;
    run.iterations = iter;
    if (!changed) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, const KMeansOptions& options,
                    Diagnostics* diag) {
  if (x.rows() == 0 || x.cols() == 0)
    throw Error(Status::invalid_argument, "kmeans input must be non-empty");
  if (k < 2) throw Error(Status::invalid_argument, "kmeans needs k >= 2");
  if (static_cast<std::size_t>(k) > x.rows())
    throw Error(Status::invalid_argument, "kmeans needs k <= number of rows");
  if (options.restarts < 1 || options.max_iterations < 1)
    throw Error(Status::invalid_argument, "kmeans options must be positive");
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error(Status::invalid_argument, "kmeans input has non-finite entries");

  KMeansResult out;
  out.duplicate_centroids = count_distinct_rows(x) < static_cast<std::size_t>(k);
  if (out.duplicate_centroids)
    note(diag, "kmeans: k exceeds the number of distinct rows; clusters will share positions");

  bool have_best = false;
  for (int rep = 0; rep < options.restarts; ++rep) {
    LloydRun run = lloyd(x, k, Rng::stream(seed, static_cast<std::uint64_t>(rep)), options.max_iterations);
    if (!have_best || run.inertia < out.inertia) {
      have_best = true;
      out.labels = std::move(run.labels);
      out.centroids = std::move(run.centroids);
      out.inertia = run.inertia;
      out.iterations = run.iterations;
      out.inertia_history = std::move(run.history);
    }
  }
  return out;
}

double dbi_clustering(const Matrix& x, const std::vector<int>& labels, int k, Diagnostics* diag) {
  if (k < 2) throw Error(Status::invalid_argument, "dbi needs k >= 2");
  if (labels.size() != x.rows())
    throw Error(Status::dimension_mismatch, "label count does not match row count");
  const std::size_t ku = static_cast<std::size_t>(k);
  const std::size_t dim = x.cols();

  Matrix centroids(ku, dim, 0.0);
  std::vector<std::size_t> sizes(ku, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (l < 0 || l >= k) throw Error(Status::invalid_argument, "label out of range");
    ++sizes[static_cast<std::size_t>(l)];
    for (std::size_t d = 0; d < dim; ++d) centroids(static_cast<std::size_t>(l), d) += x(i, d);
  }
  for (std::size_t c = 0; c < ku; ++c) {
    if (sizes[c] == 0) throw Error(Status::invalid_argument, "dbi requires no empty clusters");
    for (std::size_t d = 0; d < dim; ++d) centroids(c, d) /= static_cast<double>(sizes[c]);
  }

  std::vector<double> dispersion(ku, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t c = static_cast<std::size_t>(labels[i]);
    dispersion[c] += std::sqrt(squared_distance(x.row_ptr(i), centroids.row_ptr(c), dim));
  }
  for (std::size_t c = 0; c < ku; ++c) dispersion[c] /= static_cast<double>(sizes[c]);

  for (std::size_t a = 0; a < ku; ++a) {
    for (std::size_t b = a + 1; b < ku; ++b) {
      if (squared_distance(centroids.row_ptr(a), centroids.row_ptr(b), dim) <
          kCentroidDistanceFloor * kCentroidDistanceFloor) {
        note(diag, "dbi: coincident cluster centroids; sentinel value used");
        return kDbiSentinel;
      }
    }
  }

  double acc = 0.0;
  for (std::size_t a = 0; a < ku; ++a) {
    double worst = 0.0;
    for (std::size_t b = 0; b < ku; ++b) {
      if (a == b) continue;
      const double d = std::sqrt(squared_distance(centroids.row_ptr(a), centroids.row_ptr(b), dim));
      worst = std::max(worst, (dispersion[a] + dispersion[b]) / d);
    }
    acc += worst;
  }
  return acc / static_cast<double>(k);
}

std::uint64_t curve_kmeans_seed(std::uint64_t seed, int k) {
  return Rng::stream(seed, static_cast<std::uint64_t>(k)).next_u64();
}

KSelectionCurve r_k_curve(const Matrix& x_star, const std::vector<double>& eigenvalues, int k_min,
                          int k_max, std::uint64_t seed, const KMeansOptions& options,
                          Diagnostics* diag) {
  if (k_min < 2) throw Error(Status::invalid_argument, "r_k_curve needs k_min >= 2");
  if (k_max < k_min) throw Error(Status::invalid_argument, "r_k_curve needs k_max >= k_min");
  if (static_cast<std::size_t>(k_max) > x_star.rows())
    throw Error(Status::invalid_argument, "r_k_curve needs k_max <= embedding rows");
  if (eigenvalues.size() < static_cast<std::size_t>(k_max))
    throw Error(Status::invalid_argument, "r_k_curve needs at least k_max eigenvalues");
  for (std::size_t i = 1; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] < eigenvalues[i - 1])
      throw Error(Status::invalid_argument, "eigenvalues must be ascending");

  KSelectionCurve curve;
  double lambda_sum = 0.0;
  for (int i = 0; i < k_min - 1; ++i) lambda_sum += eigenvalues[static_cast<std::size_t>(i)];

  for (int k = k_min; k <= k_max; ++k) {
    lambda_sum += eigenvalues[static_cast<std::size_t>(k - 1)];
    const KMeansResult res = kmeans(x_star, k, curve_kmeans_seed(seed, k), options, diag);
    const double dbi = dbi_clustering(x_star, res.labels, k, diag);
    curve.entries.push_back({k, dbi, lambda_sum, dbi + lambda_sum});
  }

  curve.chosen_k = curve.entries.front().k;
  double best = curve.entries.front().r;
  for (const KSelectionEntry& e : curve.entries) {
    if (e.r < best) {
      best = e.r;
      curve.chosen_k = e.k;
    }
  }
  return curve;
}

int eigengap_k(const std::vector<double>& eigenvalues, int k_max) {
  if (eigenvalues.size() < 3)
    throw Error(Status::invalid_argument, "eigengap needs at least 3 eigenvalues");
  for (std::size_t i = 1; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] < eigenvalues[i - 1])
      throw Error(Status::invalid_argument, "eigenvalues must be ascending");
  const int hi = std::min<int>(k_max, static_cast<int>(eigenvalues.size()));
  if (hi < 2) throw Error(Status::invalid_argument, "eigengap needs k_max >= 2");

  int best_k = 1;
  double best_gap = eigenvalues[1] - eigenvalues[0];
  for (int k = 2; k < hi; ++k) {
    const double gap = eigenvalues[static_cast<std::size_t>(k)] - eigenvalues[static_cast<std::size_t>(k - 1)];
    if (gap > best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace asc
