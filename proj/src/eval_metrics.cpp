#include "asc/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace asc {

namespace {

std::vector<int> compress(const std::vector<int>& labels, std::size_t& out_count) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  std::vector<int> dense(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) dense[i] = ids[labels[i]];
  out_count = ids.size();
  return dense;
}

std::int64_t pairs(std::int64_t n) { return n * (n - 1) / 2; }

}  // namespace

Contingency Contingency::build(const std::vector<int>& pred, const std::vector<int>& gt) {
  if (pred.size() != gt.size())
    throw Error(Status::dimension_mismatch, "labelings have different lengths");
  if (pred.empty()) throw Error(Status::invalid_argument, "labelings are empty");

  std::size_t np = 0, ng = 0;
  const std::vector<int> p = compress(pred, np);
  const std::vector<int> g = compress(gt, ng);

  Contingency c;
  c.total = static_cast<std::int64_t>(pred.size());
  c.counts.assign(np, std::vector<std::int64_t>(ng, 0));
  c.pred_sizes.assign(np, 0);
  c.gt_sizes.assign(ng, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++c.counts[static_cast<std::size_t>(p[i])][static_cast<std::size_t>(g[i])];
    ++c.pred_sizes[static_cast<std::size_t>(p[i])];
    ++c.gt_sizes[static_cast<std::size_t>(g[i])];
  }
  return c;
}

double f_measure_foreground(const std::vector<int>& pred, const std::vector<int>& gt_binary,
                            const std::vector<int>& fg_labels) {
  if (pred.size() != gt_binary.size())
    throw Error(Status::dimension_mismatch, "prediction and mask have different lengths");
  if (pred.empty()) throw Error(Status::invalid_argument, "empty labelings");

  std::map<int, std::pair<std::int64_t, std::int64_t>> overlap;  // label -> (fg, bg)
  std::int64_t gt_fg = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    auto& [fg, bg] = overlap[pred[i]];
    if (gt_binary[i] != 0) {
      ++fg;
      ++gt_fg;
    } else {
      ++bg;
    }
  }

  std::int64_t tp = 0, pred_fg = 0;
  for (const auto& [label, counts] : overlap) {
    const auto& [fg, bg] = counts;
    bool is_fg;
    if (!fg_labels.empty()) {
      is_fg = std::find(fg_labels.begin(), fg_labels.end(), label) != fg_labels.end();
    } else {
      is_fg = fg > bg;  // strict majority; ties stay background
    }
    if (is_fg) {
      pred_fg += fg + bg;
      tp += fg;
    }
  }

  const double precision = pred_fg > 0 ? static_cast<double>(tp) / static_cast<double>(pred_fg) : 0.0;
  const double recall = gt_fg > 0 ? static_cast<double>(tp) / static_cast<double>(gt_fg) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double segmentation_covering(const std::vector<int>& pred, const std::vector<int>& gt) {
  const Contingency c = Contingency::build(pred, gt);
  double acc = 0.0;
  for (std::size_t j = 0; j < c.gt_sizes.size(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < c.pred_sizes.size(); ++i) {
      const std::int64_t inter = c.counts[i][j];
      if (inter == 0) continue;
      const std::int64_t uni = c.pred_sizes[i] + c.gt_sizes[j] - inter;
      best = std::max(best, static_cast<double>(inter) / static_cast<double>(uni));
    }
    acc += static_cast<double>(c.gt_sizes[j]) * best;
  }
  return acc / static_cast<double>(c.total);
}

double pri(const std::vector<int>& pred, const std::vector<int>& gt) {
  const Contingency c = Contingency::build(pred, gt);
  if (c.total < 2) throw Error(Status::invalid_argument, "pri needs at least 2 points");

  std::int64_t same_both = 0, same_pred = 0, same_gt = 0;
  for (std::size_t i = 0; i < c.counts.size(); ++i)
    for (std::int64_t n : c.counts[i]) same_both += pairs(n);
  for (std::int64_t n : c.pred_sizes) same_pred += pairs(n);
  for (std::int64_t n : c.gt_sizes) same_gt += pairs(n);

  const std::int64_t all = pairs(c.total);
  const std::int64_t agreements = all + 2 * same_both - same_pred - same_gt;
  return static_cast<double>(agreements) / static_cast<double>(all);
}

double vi(const std::vector<int>& pred, const std::vector<int>& gt) {
  const Contingency c = Contingency::build(pred, gt);
  const double n = static_cast<double>(c.total);

  double h_pred = 0.0, h_gt = 0.0, mutual = 0.0;
  for (std::int64_t s : c.pred_sizes) {
    const double p = static_cast<double>(s) / n;
    if (p > 0.0) h_pred -= p * std::log(p);
  }
  for (std::int64_t s : c.gt_sizes) {
    const double p = static_cast<double>(s) / n;
    if (p > 0.0) h_gt -= p * std::log(p);
  }
  for (std::size_t i = 0; i < c.counts.size(); ++i) {
    for (std::size_t j = 0; j < c.counts[i].size(); ++j) {
      const std::int64_t nij = c.counts[i][j];
      if (nij == 0) continue;
      const double pij = static_cast<double>(nij) / n;
      const double pi = static_cast<double>(c.pred_sizes[i]) / n;
      const double pj = static_cast<double>(c.gt_sizes[j]) / n;
      mutual += pij * std::log(pij / (pi * pj));
    }
  }
  return std::max(h_pred + h_gt - 2.0 * mutual, 0.0);
}

std::int64_t max_assignment_sum(const std::vector<std::vector<std::int64_t>>& scores) {
  if (scores.empty()) return 0;
  const std::size_t rows = scores.size();
  const std::size_t cols = scores.front().size();
  const std::size_t n = std::max(rows, cols);

  std::int64_t max_score = 0;
  for (const auto& row : scores)
    for (std::int64_t v : row) max_score = std::max(max_score, v);

  // pad to square and convert to a min-cost problem
  std::vector<std::vector<std::int64_t>> cost(n + 1, std::vector<std::int64_t>(n + 1, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i + 1][j + 1] = max_score - (i < rows && j < cols ? scores[i][j] : 0);

  // standard O(n^3) assignment with row/column potentials
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0), match(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, std::numeric_limits<std::int64_t>::max());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      std::int64_t delta = std::numeric_limits<std::int64_t>::max();
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::int64_t total = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j];
    if (i >= 1 && i <= rows && j <= cols) total += scores[i - 1][j - 1];
  }
  return total;
}

double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency c = Contingency::build(pred, truth);
  const std::int64_t matched = max_assignment_sum(c.counts);
  return static_cast<double>(matched) / static_cast<double>(c.total);
}

}  // namespace asc
