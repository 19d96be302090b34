#include <doctest.h>

#include <cmath>

#include "asc/common.hpp"
#include "asc/eval_metrics.hpp"
#include "support/oracles.hpp"

using namespace asc;

namespace {

std::vector<int> random_partition(std::size_t n, int max_labels, Rng& rng) {
  std::vector<int> labels(n);
  for (int& l : labels) l = static_cast<int>(rng.next_index(static_cast<std::size_t>(max_labels)));
  return labels;
}

}  // namespace

TEST_CASE("f_measure: identical binary segmentations score 1") {
  const std::vector<int> gt{0, 0, 1, 1, 1, 0};
  CHECK(f_measure_foreground(gt, gt) == doctest::Approx(1.0));
}

TEST_CASE("f_measure: half-covered foreground gives 2/3") {
  // gt foreground = 4 pixels; prediction covers exactly half of it and
  // nothing else -> P = 1, R = 0.5, F = 2/3
  const std::vector<int> gt{1, 1, 1, 1, 0, 0, 0, 0};
  const std::vector<int> pred{5, 5, 6, 6, 6, 6, 6, 6};
  // segment 5 sits fully on fg; segment 6 is 2 fg / 4 bg -> background
  CHECK(f_measure_foreground(pred, gt) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("f_measure: empty predicted foreground scores 0") {
  const std::vector<int> gt{1, 1, 0, 0, 0};
  const std::vector<int> pred{3, 3, 3, 3, 3};  // majority background everywhere
  CHECK(f_measure_foreground(pred, gt) == 0.0);
}

TEST_CASE("f_measure: explicit foreground labels override the majority rule") {
  const std::vector<int> gt{1, 1, 0, 0, 0, 0};
  const std::vector<int> pred{7, 7, 7, 7, 7, 7};
  CHECK(f_measure_foreground(pred, gt) == 0.0);  // majority rule: background
  const double f = f_measure_foreground(pred, gt, {7});
  // P = 2/6, R = 1 -> F = 0.5
  CHECK(f == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("covering: identical partitions score 1") {
  const std::vector<int> labels{0, 1, 1, 2, 0};
  CHECK(segmentation_covering(labels, labels) == doctest::Approx(1.0));
}

TEST_CASE("covering: all-one-segment prediction on a 2x2 split scores 0.5") {
  const std::vector<int> gt{0, 1, 0, 1};  // left/right halves of a 2x2 grid
  const std::vector<int> pred{0, 0, 0, 0};
  CHECK(segmentation_covering(pred, gt) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pri: hand case with 2 of 6 agreeing pairs") {
  const std::vector<int> pred{0, 0, 1, 1};
  const std::vector<int> gt{0, 1, 0, 1};
  CHECK(pri(pred, gt) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("vi: singletons vs one segment on 4 points is ln 4") {
  const std::vector<int> pred{0, 1, 2, 3};
  const std::vector<int> gt{0, 0, 0, 0};
  CHECK(vi(pred, gt) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(vi(gt, pred) == doctest::Approx(vi(pred, gt)).epsilon(1e-15));
}

TEST_CASE("metrics agree with brute-force definitions on random partitions") {
  Rng rng(123);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rng.next_index(19);
    const std::vector<int> a = random_partition(n, 4, rng);
    const std::vector<int> b = random_partition(n, 4, rng);
    CHECK(pri(a, b) == doctest::Approx(oracle::pri_pairwise(a, b)).epsilon(1e-12));
    CHECK(vi(a, b) == doctest::Approx(oracle::vi_entropy(a, b)).epsilon(1e-12));
    CHECK(segmentation_covering(a, b) ==
          doctest::Approx(oracle::covering_sets(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("metrics are invariant under consistent relabeling") {
  Rng rng(7);
  const std::size_t n = 18;
  const std::vector<int> a = random_partition(n, 3, rng);
  const std::vector<int> b = random_partition(n, 3, rng);
  std::vector<int> a_renamed(a);
  for (int& l : a_renamed) l = 100 - 7 * l;  // injective relabeling
  CHECK(pri(a_renamed, b) == doctest::Approx(pri(a, b)).epsilon(1e-15));
  CHECK(vi(a_renamed, b) == doctest::Approx(vi(a, b)).epsilon(1e-15));
  CHECK(segmentation_covering(a_renamed, b) ==
        doctest::Approx(segmentation_covering(a, b)).epsilon(1e-15));
  CHECK(clustering_accuracy(a_renamed, b) ==
        doctest::Approx(clustering_accuracy(a, b)).epsilon(1e-15));
}

TEST_CASE("vi is zero exactly on identical partitions") {
  Rng rng(15);
  const std::vector<int> a = random_partition(25, 4, rng);
  CHECK(vi(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  std::vector<int> b(a);
  b[0] = b[0] == 0 ? 1 : 0;
  CHECK(vi(a, b) > 0.0);
}

TEST_CASE("clustering_accuracy: permutations are absorbed") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> pred{2, 2, 0, 0, 1, 1};
  CHECK(clustering_accuracy(pred, truth) == doctest::Approx(1.0));
}

TEST_CASE("clustering_accuracy: hand case 3/4") {
  const std::vector<int> pred{0, 0, 1, 1};
  const std::vector<int> truth{0, 1, 1, 1};
  CHECK(clustering_accuracy(pred, truth) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("clustering_accuracy: matches exhaustive matching on random labelings") {
  Rng rng(77);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 3 + rng.next_index(14);
    const std::vector<int> pred = random_partition(n, 4, rng);
    const std::vector<int> truth = random_partition(n, 3, rng);
    CHECK(clustering_accuracy(pred, truth) ==
          doctest::Approx(oracle::accuracy_exhaustive(pred, truth)).epsilon(1e-12));
  }
}

TEST_CASE("metric bounds hold on random partitions") {
  Rng rng(55);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng.next_index(19);
    const std::vector<int> a = random_partition(n, 5, rng);
    const std::vector<int> b = random_partition(n, 5, rng);
    const double c = segmentation_covering(a, b);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    const double p = pri(a, b);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    const double v = vi(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("metrics reject mismatched lengths") {
  CHECK_THROWS_AS((void)pri({0, 1}, {0, 1, 2}), Error);
  CHECK_THROWS_AS((void)vi({}, {}), Error);
  CHECK_THROWS_AS((void)f_measure_foreground({0}, {0, 1}), Error);
}
