#include "asc/eigen_select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "asc/embed_cluster.hpp"

namespace asc {

namespace {

constexpr double kDbiSentinel = 1e6;
constexpr double kDbiFloor = 1e-6;
constexpr double kLambdaFloor = 1e-10;
constexpr double kCentroidDistanceFloor = 1e-30;
constexpr std::size_t kMaxHistogramBins = 1024;

// Optimal contiguous c-way split of sorted values by within-cluster SSE.
// Returns the first index of each segment (size c), via O(c n^2) dynamic
// programming with prefix sums; plenty fast for the few-hundred sizes here.
std::vector<std::size_t> optimal_splits(const std::vector<double>& sorted, int c) {
  const std::size_t n = sorted.size();
  const std::size_t cu = static_cast<std::size_t>(c);
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    s1[i + 1] = s1[i] + sorted[i];
    s2[i + 1] = s2[i] + sorted[i] * sorted[i];
  }
  auto sse = [&](std::size_t i, std::size_t j) {  // inclusive segment [i, j]
    const double cnt = static_cast<double>(j - i + 1);
    const double sum = s1[j + 1] - s1[i];
    return (s2[j + 1] - s2[i]) - sum * sum / cnt;
  };

  const double inf = std::numeric_limits<double>::infinity();
  Matrix cost(cu, n, inf);
  std::vector<std::vector<std::size_t>> from(cu, std::vector<std::size_t>(n, 0));
  for (std::size_t j = 0; j < n; ++j) cost(0, j) = sse(0, j);
  for (std::size_t t = 1; t < cu; ++t) {
    for (std::size_t j = t; j < n; ++j) {
      for (std::size_t i = t; i <= j; ++i) {
        const double v = cost(t - 1, i - 1) + sse(i, j);
        if (v < cost(t, j)) {
          cost(t, j) = v;
          from[t][j] = i;
        }
      }
    }
  }

  std::vector<std::size_t> starts(cu);
  std::size_t end = n - 1;
  for (std::size_t t = cu; t-- > 0;) {
    const std::size_t start = t == 0 ? 0 : from[t][end];
    starts[t] = start;
    if (t > 0) end = start - 1;
  }
  return starts;
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double quartile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<int> kmeans_1d_optimal(const std::vector<double>& values, int c) {
  const std::size_t n = values.size();
  if (c < 1 || static_cast<std::size_t>(c) > n)
    throw Error(Status::invalid_argument, "1-D clustering needs 1 <= c <= n");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = values[order[i]];

  const std::vector<std::size_t> starts = optimal_splits(sorted, c);
  std::vector<int> labels(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int cluster = c - 1;
    for (int t = 1; t < c; ++t) {
      if (i < starts[static_cast<std::size_t>(t)]) {
        cluster = t - 1;
        break;
      }
    }
    labels[order[i]] = cluster;
  }
  return labels;
}

double dbi_1d(const std::vector<double>& values, int c, Diagnostics* diag) {
  const std::size_t n = values.size();
  if (c < 2) throw Error(Status::invalid_argument, "dbi_1d needs c >= 2");
  if (n < static_cast<std::size_t>(c))
    throw Error(Status::invalid_argument, "dbi_1d needs at least c values");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(Status::invalid_argument, "dbi_1d input has non-finite values");

  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx) {
    note(diag, "dbi_1d: all values identical; sentinel value used");
    return kDbiSentinel;
  }

  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const std::vector<std::size_t> starts = optimal_splits(sorted, c);

  const std::size_t cu = static_cast<std::size_t>(c);
  std::vector<double> centroid(cu), spread(cu);
  for (std::size_t t = 0; t < cu; ++t) {
    const std::size_t lo = starts[t];
    const std::size_t hi = (t + 1 < cu ? starts[t + 1] : sorted.size()) - 1;
    const double cnt = static_cast<double>(hi - lo + 1);
    double sum = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) sum += sorted[i];
    centroid[t] = sum / cnt;
    double dev = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) dev += std::abs(sorted[i] - centroid[t]);
    spread[t] = dev / cnt;
  }

  for (std::size_t a = 0; a < cu; ++a)
    for (std::size_t b = a + 1; b < cu; ++b)
      if (std::abs(centroid[a] - centroid[b]) < kCentroidDistanceFloor) {
        note(diag, "dbi_1d: coincident cluster centroids; sentinel value used");
        return kDbiSentinel;
      }

  double acc = 0.0;
  for (std::size_t a = 0; a < cu; ++a) {
    double worst = 0.0;
    for (std::size_t b = 0; b < cu; ++b) {
      if (a == b) continue;
      worst = std::max(worst, (spread[a] + spread[b]) / std::abs(centroid[a] - centroid[b]));
    }
    acc += worst;
  }
  return acc / static_cast<double>(c);
}

std::vector<EigenScore> relevance_scores(const SpectralDecomposition& decomp, Diagnostics* diag) {
  const std::size_t m = decomp.eigenvalues.size();
  if (m < 5)
    throw Error(Status::invalid_argument, "relevance scoring needs at least 5 eigenpairs");

  // a sentinel-valued term marks a degenerate clustering (coincident
  // centroids), which is no separation evidence at all: it enters the sum at
  // the floor, like a perfectly separated zero
  const auto term = [](double dbi) {
    return dbi >= kDbiSentinel ? kDbiFloor : std::max(dbi, kDbiFloor);
  };

  std::vector<EigenScore> scores;
  scores.reserve(m - 1);
  for (std::size_t col = 1; col < m; ++col) {
    EigenScore s;
    s.index = col + 1;
    s.lambda = decomp.eigenvalues[col];
    const std::vector<double> values = decomp.eigenvectors.column(col);
    s.dbi2 = dbi_1d(values, 2, diag);
    s.dbi3 = dbi_1d(values, 3, diag);
    s.dbi4 = dbi_1d(values, 4, diag);
    s.dbi_sum = term(s.dbi2) + term(s.dbi3) + term(s.dbi4);
    s.r = s.dbi_sum / std::max(s.lambda, kLambdaFloor);
    scores.push_back(s);
  }
  return scores;
}

double fd_bin_width(const std::vector<double>& values, Diagnostics* diag) {
  if (values.size() < 4)
    throw Error(Status::invalid_argument, "fd_bin_width needs at least 4 values");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quartile(sorted, 0.75) - quartile(sorted, 0.25);
  const double n = static_cast<double>(sorted.size());
  if (iqr <= 0.0) {
    note(diag, "fd_bin_width: zero interquartile range; using range/sqrt(n) fallback");
    return (sorted.back() - sorted.front()) / std::sqrt(n);
  }
  return 2.0 * iqr * std::pow(n, -1.0 / 3.0);
}

SelectionResult select_eigenvectors(const std::vector<EigenScore>& scores,
                                    const SpectralDecomposition& decomp,
                                    double variance_threshold, bool refine_use_components,
                                    Diagnostics* diag) {
  if (scores.empty()) throw Error(Status::invalid_argument, "select_eigenvectors needs scores");
  const std::size_t m = decomp.eigenvalues.size();

  SelectionResult out;
  out.scores = scores;
  std::vector<double> rs(scores.size()), logs(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    rs[i] = scores[i].r;
    // r > 0 always: dbi_sum is floored and lambda is capped at 2
    logs[i] = std::log10(scores[i].r);
  }
  out.mu = std::accumulate(rs.begin(), rs.end(), 0.0) / static_cast<double>(rs.size());
  out.sigma = sample_std(rs, out.mu);
  out.mu_log10 = std::accumulate(logs.begin(), logs.end(), 0.0) / static_cast<double>(logs.size());
  out.sigma_log10 = sample_std(logs, out.mu_log10);
  out.fd_width = rs.size() >= 4 ? fd_bin_width(rs, diag) : 0.0;

  // upper tail only: low scores are positive evidence of uninformativeness
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (logs[i] > out.mu_log10 + out.sigma_log10) out.chosen.push_back(scores[i].index);

  if (out.chosen.empty()) {
    out.fallback_used = true;
    const int k_max = static_cast<int>(std::min<std::size_t>(m, 50));
    const int gap = eigengap_k(decomp.eigenvalues, k_max);
    const std::size_t hi = static_cast<std::size_t>(std::max(gap, 2));
    for (std::size_t idx = 2; idx <= hi && idx <= m; ++idx) out.chosen.push_back(idx);
    note(diag, "select_eigenvectors: no relevance outliers; eigengap fallback chose indices 2.." +
                   std::to_string(out.chosen.back()));
  }

  out.x = Matrix(m, out.chosen.size());
  for (std::size_t j = 0; j < out.chosen.size(); ++j) {
    const std::size_t col = out.chosen[j] - 1;
    for (std::size_t i = 0; i < m; ++i) out.x(i, j) = decomp.eigenvectors(i, col);
  }
  out.x_star = refine_variance(out.x, variance_threshold, refine_use_components, diag);
  return out;
}

Matrix refine_variance(const Matrix& x, double threshold, bool use_components, Diagnostics* diag) {
  if (x.cols() < 1) throw Error(Status::invalid_argument, "refine_variance needs columns");
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(Status::invalid_argument, "variance threshold must be in (0,1]");

  const PcaResult p = pca(x, diag);
  if (p.degenerate) {
    note(diag, "refine_variance: zero variance; keeping the first column only");
    Matrix out(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, 0) = x(i, 0);
    return out;
  }

  std::size_t keep = x.cols();
  double cum = 0.0;
  for (std::size_t j = 0; j < p.explained_variance_ratios.size(); ++j) {
    cum += p.explained_variance_ratios[j];
    if (cum >= threshold - 1e-12) {
      keep = j + 1;
      break;
    }
  }

  if (!use_components) {
    Matrix out(x.rows(), keep);
    for (std::size_t j = 0; j < keep; ++j)
      for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = x(i, j);
    return out;
  }

  // projection scores onto the leading components
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
  for (double& v : mean) v /= static_cast<double>(x.rows());
  Matrix out(x.rows(), keep, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < keep; ++j)
      for (std::size_t d = 0; d < x.cols(); ++d)
        out(i, j) += (x(i, d) - mean[d]) * p.loadings(d, j);
  return out;
}

HistogramData score_histogram(const SelectionResult& selection, Diagnostics* diag) {
  HistogramData h;
  h.mu = selection.mu;
  h.sigma = selection.sigma;
  h.bin_width = selection.fd_width;

  std::vector<double> rs(selection.scores.size());
  for (std::size_t i = 0; i < rs.size(); ++i) rs[i] = selection.scores[i].r;
  if (rs.empty()) return h;
  const auto [mn, mx] = std::minmax_element(rs.begin(), rs.end());
  const double lo = *mn, hi = *mx;

  double width = h.bin_width;
  std::size_t bins = 1;
  if (width > 0.0 && hi > lo) {
    bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    bins = std::max<std::size_t>(bins, 1);
    if (bins > kMaxHistogramBins) {
      note(diag, "score_histogram: bin count capped at " + std::to_string(kMaxHistogramBins));
      bins = kMaxHistogramBins;
      width = (hi - lo) / static_cast<double>(bins);
      h.bin_width = width;
    }
  } else {
    width = hi > lo ? hi - lo : 1.0;
    h.bin_width = width;
  }

  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) h.bin_edges.push_back(lo + width * static_cast<double>(b));
  for (double r : rs) {
    std::size_t b = static_cast<std::size_t>((r - lo) / width);
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

void write_scores_csv(const SelectionResult& selection, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");
  f.precision(17);
  f << "index,lambda,dbi2,dbi3,dbi4,r,chosen\n";
  for (const EigenScore& s : selection.scores) {
    const bool chosen =
        std::find(selection.chosen.begin(), selection.chosen.end(), s.index) != selection.chosen.end();
    f << s.index << "," << s.lambda << "," << s.dbi2 << "," << s.dbi3 << "," << s.dbi4 << ","
      << s.r << "," << (chosen ? 1 : 0) << "\n";
  }
}

}  // namespace asc
