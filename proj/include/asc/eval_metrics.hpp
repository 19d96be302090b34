#pragma once

#include <cstdint>
#include <vector>

#include "asc/common.hpp"

namespace asc {

/// Joint label-count table between two labelings of the same points. Labels
/// may be arbitrary integers; they are compressed to dense ids in ascending
/// label order.
struct Contingency {
  std::vector<std::vector<std::int64_t>> counts;  // [pred][gt]
  std::vector<std::int64_t> pred_sizes;
  std::vector<std::int64_t> gt_sizes;
  std::int64_t total = 0;

  static Contingency build(const std::vector<int>& pred, const std::vector<int>& gt);
};

/// F-measure of the predicted foreground against a binary ground truth
/// (nonzero = foreground). The predicted foreground is the union of predicted
/// segments whose pixels fall mostly on ground-truth foreground; pass explicit
/// labels in `fg_labels` to override that rule.
double f_measure_foreground(const std::vector<int>& pred, const std::vector<int>& gt_binary,
                            const std::vector<int>& fg_labels = {});

/// Mean best-overlap (Jaccard) of ground-truth regions, weighted by size.
double segmentation_covering(const std::vector<int>& pred, const std::vector<int>& gt);

/// Fraction of point pairs on which the partitions agree.
double pri(const std::vector<int>& pred, const std::vector<int>& gt);

/// Variation of information H(pred) + H(gt) - 2 I(pred, gt), natural log.
double vi(const std::vector<int>& pred, const std::vector<int>& gt);

/// Best-match accuracy: maximum fraction of identically-labeled points over
/// all one-to-one cluster matchings (Hungarian assignment on the counts).
double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// Maximum-sum assignment value on a rectangular non-negative score table.
std::int64_t max_assignment_sum(const std::vector<std::vector<std::int64_t>>& scores);

}  // namespace asc
