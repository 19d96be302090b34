#pragma once

#include <cstdint>
#include <vector>

#include "asc/common.hpp"
#include "asc/linalg.hpp"

namespace asc {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
};

struct KMeansResult {
  std::vector<int> labels;              // one per row, in [0, k)
  Matrix centroids;                     // k rows
  double inertia = 0.0;                 // sum of squared distances to assigned centroid
  int iterations = 0;                   // Lloyd iterations of the winning restart
  std::vector<double> inertia_history;  // inertia after each iteration (winning restart)
  bool duplicate_centroids = false;     // k exceeded the number of distinct rows
};

/// Seeded k-means++ plus Lloyd iterations to an assignment fixpoint (or the
/// iteration cap), best of `restarts` runs by inertia. Empty clusters are
/// repaired by handing them the point farthest from its centroid, so the
/// returned clustering has no empty cluster.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, const KMeansOptions& options = {},
                    Diagnostics* diag = nullptr);

/// Davies-Bouldin index of a labeled clustering: dispersion is the mean
/// Euclidean distance to the cluster centroid, separation the centroid
/// distance. Coincident centroids yield the 1e6 sentinel with a diagnostic.
double dbi_clustering(const Matrix& x, const std::vector<int>& labels, int k,
                      Diagnostics* diag = nullptr);

struct KSelectionEntry {
  int k = 0;
  double dbi = 0.0;
  double lambda_sum = 0.0;
  double r = 0.0;  // dbi + lambda_sum
};

struct KSelectionCurve {
  std::vector<KSelectionEntry> entries;
  int chosen_k = 0;  // argmin r, smallest k on ties
};

/// Scores every cluster count in [k_min, k_max]: cluster separation in the
/// embedding plus the accumulated sum of the k smallest eigenvalues, which
/// penalizes counts that reach past the near-zero spectrum. The minimizer is
/// the self-tuned cluster count.
KSelectionCurve r_k_curve(const Matrix& x_star, const std::vector<double>& eigenvalues, int k_min,
                          int k_max, std::uint64_t seed, const KMeansOptions& options = {},
                          Diagnostics* diag = nullptr);

/// Seed used by r_k_curve for the k-means run at a given k; re-running kmeans
/// with it reproduces the curve's clustering exactly.
std::uint64_t curve_kmeans_seed(std::uint64_t seed, int k);

/// Baseline estimate: the k (1-based, k < k_max) with the largest gap between
/// consecutive ascending eigenvalues; smallest k on ties.
int eigengap_k(const std::vector<double>& eigenvalues, int k_max);

}  // namespace asc
