#pragma once

#include <string>
#include <vector>

#include "asc/common.hpp"
#include "asc/linalg.hpp"

namespace asc {

/// Relevance of one eigenpair. `index` is the 1-based eigenpair position in
/// ascending-eigenvalue order (index 1, the connectivity eigenvector, is never
/// scored).
struct EigenScore {
  std::size_t index = 0;
  double dbi2 = 0.0;
  double dbi3 = 0.0;
  double dbi4 = 0.0;
  double dbi_sum = 0.0;  // sum of the floored 2/3/4-cluster terms
  double lambda = 0.0;
  double r = 0.0;  // dbi_sum / max(lambda, 1e-10)
};

struct SelectionResult {
  std::vector<EigenScore> scores;
  double mu = 0.0;            // mean of r
  double sigma = 0.0;         // sample standard deviation of r
  double mu_log10 = 0.0;      // mean of log10(r); the outlier test runs here
  double sigma_log10 = 0.0;   // sample standard deviation of log10(r)
  double fd_width = 0.0;      // Freedman-Diaconis bin width of the r histogram
  std::vector<std::size_t> chosen;  // 1-based indices, ascending eigenvalue order
  Matrix x;                         // chosen eigenvectors as columns
  Matrix x_star;                    // variance-refined prefix of x
  bool fallback_used = false;       // no outliers; eigengap fallback applied
};

/// Davies-Bouldin index of the optimal c-way 1-D clustering of `values`
/// (exact dynamic-programming k-means, deterministic). Dispersion is the mean
/// absolute deviation from the cluster centroid. All-identical values or
/// coincident centroids return the 1e6 sentinel with a diagnostic.
double dbi_1d(const std::vector<double>& values, int c, Diagnostics* diag = nullptr);

/// Optimal SSE c-way clustering of 1-D values; labels follow input order.
std::vector<int> kmeans_1d_optimal(const std::vector<double>& values, int c);

/// Scores every eigenpair except the first: separation power over 2..4
/// clusters, divided by the eigenvalue so near-zero eigenvalues dominate.
std::vector<EigenScore> relevance_scores(const SpectralDecomposition& decomp,
                                         Diagnostics* diag = nullptr);

/// Freedman-Diaconis histogram bin width 2*IQR*n^(-1/3) with linearly
/// interpolated quartiles; zero IQR falls back to range/sqrt(n).
double fd_bin_width(const std::vector<double>& values, Diagnostics* diag = nullptr);

/// Keeps the eigenvectors whose relevance stands out above the mu + sigma
/// bound of the score distribution and assembles them (ascending eigenvalue
/// order) into x, then refines x to x_star by the explained-variance rule.
/// The bound is computed on log10(r): the eigenvalue division spreads
/// relevance over orders of magnitude, and on a linear scale the bound ends
/// up tracking the single largest score, dropping co-informative
/// eigenvectors. When no score is an outlier the eigengap estimate picks
/// indices 2..k_gap instead (diagnostic emitted).
SelectionResult select_eigenvectors(const std::vector<EigenScore>& scores,
                                    const SpectralDecomposition& decomp,
                                    double variance_threshold = 0.8,
                                    bool refine_use_components = false,
                                    Diagnostics* diag = nullptr);

/// First p columns of x, with p the smallest count whose principal components
/// explain at least `threshold` of the variance. With `use_components` the
/// projections onto those components are returned instead of original columns.
Matrix refine_variance(const Matrix& x, double threshold = 0.8, bool use_components = false,
                       Diagnostics* diag = nullptr);

struct HistogramData {
  std::vector<double> bin_edges;
  std::vector<int> counts;
  double mu = 0.0;
  double sigma = 0.0;
  double bin_width = 0.0;
};

/// Bins the relevance scores with the Freedman-Diaconis width (capped at 1024
/// bins) for plotting alongside the mu +/- sigma markers.
HistogramData score_histogram(const SelectionResult& selection, Diagnostics* diag = nullptr);

/// index,lambda,dbi2,dbi3,dbi4,r,chosen table.
void write_scores_csv(const SelectionResult& selection, const std::string& path);

}  // namespace asc
