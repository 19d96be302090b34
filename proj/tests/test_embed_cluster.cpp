#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "asc/embed_cluster.hpp"
#include "support/oracles.hpp"

using namespace asc;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace

TEST_CASE("kmeans: identical rows stay valid after empty-cluster repair") {
  const Matrix x(6, 2, 3.0);
  Diagnostics diag;
  const KMeansResult r = kmeans(x, 2, 1, {}, &diag);
  CHECK(r.inertia == doctest::Approx(0.0));
  CHECK(r.duplicate_centroids);
  CHECK(!diag.empty());
  std::vector<int> counts(2, 0);
  for (int l : r.labels) {
    REQUIRE(l >= 0);
    REQUIRE(l < 2);
    ++counts[static_cast<std::size_t>(l)];
  }
  CHECK(counts[0] > 0);
  CHECK(counts[1] > 0);  // no empty cluster
}

TEST_CASE("kmeans: k equal to distinct rows reaches zero inertia") {
  Rng rng(3);
  Matrix x(8, 2);
  for (std::size_t i = 0; i < 8; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = rng.next_double();
  }
  const KMeansResult r = kmeans(x, 8, 7);
  CHECK(r.inertia == doctest::Approx(0.0));
}

TEST_CASE("kmeans: two separated blobs match the brute-force best 2-partition") {
  Rng rng(11);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({rng.next_double() * 0.2, rng.next_double() * 0.2});
  for (int i = 0; i < 10; ++i)
    rows.push_back({1.0 + rng.next_double() * 0.2, rng.next_double() * 0.2});
  const Matrix x = from_rows(rows);
  const KMeansResult r = kmeans(x, 2, 5);

  // brute force: best 2-partition by sum of squared distances to means
  double best = 1e300;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 1; mask < (1u << 20) - 1; ++mask) {
    double sum[2][2] = {{0, 0}, {0, 0}};
    int count[2] = {0, 0};
    for (int i = 0; i < 20; ++i) {
      const int side = (mask >> i) & 1;
      sum[side][0] += rows[static_cast<std::size_t>(i)][0];
      sum[side][1] += rows[static_cast<std::size_t>(i)][1];
      ++count[side];
    }
    if (count[0] == 0 || count[1] == 0) continue;
    double sse = 0.0;
    for (int i = 0; i < 20; ++i) {
      const int side = (mask >> i) & 1;
      const double dx = rows[static_cast<std::size_t>(i)][0] - sum[side][0] / count[side];
      const double dy = rows[static_cast<std::size_t>(i)][1] - sum[side][1] / count[side];
      sse += dx * dx + dy * dy;
    }
    if (sse < best) {
      best = sse;
      best_mask = mask;
    }
  }
  CHECK(r.inertia == doctest::Approx(best).epsilon(1e-9));
  for (int i = 1; i < 20; ++i) {
    const bool same_kmeans = r.labels[static_cast<std::size_t>(i)] == r.labels[0];
    const bool same_oracle = ((best_mask >> i) & 1) == (best_mask & 1);
    CHECK(same_kmeans == same_oracle);
  }
}

TEST_CASE("kmeans: inertia history is non-increasing") {
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 8 + rng.next_index(30);
    const std::size_t d = 1 + rng.next_index(4);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.next_double() * 10.0;
    const int k = 2 + static_cast<int>(rng.next_index(std::min<std::size_t>(n - 1, 6)));
    const KMeansResult r = kmeans(x, k, rep);
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
      CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-9);
  }
}

TEST_CASE("kmeans: deterministic for a fixed seed") {
  Rng rng(29);
  Matrix x(30, 2);
  for (std::size_t i = 0; i < 30; ++i) {
    x(i, 0) = rng.next_double();
    x(i, 1) = rng.next_double();
  }
  const KMeansResult a = kmeans(x, 4, 123);
  const KMeansResult b = kmeans(x, 4, 123);
  CHECK(a.labels == b.labels);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("kmeans: input validation") {
  const Matrix x(4, 2, 1.0);
  CHECK_THROWS_AS((void)kmeans(x, 1, 0), Error);
  CHECK_THROWS_AS((void)kmeans(x, 5, 0), Error);
}

TEST_CASE("dbi_clustering: sentinel on coincident centroids") {
  const Matrix x(4, 2, 2.0);
  Diagnostics diag;
  CHECK(dbi_clustering(x, {0, 0, 1, 1}, 2, &diag) == 1e6);
  CHECK(!diag.empty());
}

TEST_CASE("r_k_curve: three ideal indicator clusters choose k = 3") {
  // 12 rows at three orthogonal corners, eigenvalues near zero up to index 3
  std::vector<std::vector<double>> rows;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 4; ++i) {
      std::vector<double> row(3, 0.0);
      row[static_cast<std::size_t>(c)] = 1.0;
      rows.push_back(row);
    }
  const Matrix x = from_rows(rows);
  const std::vector<double> eigenvalues{0.0, 0.0, 0.0, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3};
  const KSelectionCurve curve = r_k_curve(x, eigenvalues, 2, 6, 3);
  REQUIRE(curve.entries.size() == 5);
  CHECK(curve.chosen_k == 3);
  const auto r_at = [&](int k) {
    for (const KSelectionEntry& e : curve.entries)
      if (e.k == k) return e.r;
    return -1.0;
  };
  CHECK(r_at(2) > r_at(3));
  CHECK(r_at(4) > r_at(3));
  // the eigenvalue sum is non-decreasing along the curve
  for (std::size_t i = 1; i < curve.entries.size(); ++i)
    CHECK(curve.entries[i].lambda_sum >= curve.entries[i - 1].lambda_sum);
}

TEST_CASE("r_k_curve: large flat eigenvalues force a small k") {
  Rng rng(31);
  Matrix x(10, 2);
  for (std::size_t i = 0; i < 10; ++i) {
    x(i, 0) = rng.next_double();
    x(i, 1) = rng.next_double();
  }
  const std::vector<double> eigenvalues(10, 1.0);
  const KSelectionCurve curve = r_k_curve(x, eigenvalues, 2, 8, 9);
  CHECK(curve.chosen_k <= 3);
}

TEST_CASE("r_k_curve: chosen k invariant under row permutation") {
  Rng rng(37);
  std::vector<std::vector<double>> rows;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 5; ++i)
      rows.push_back({c * 2.0 + 0.05 * rng.next_double(), c * -1.5 + 0.05 * rng.next_double()});
  const Matrix x = from_rows(rows);
  std::vector<double> eigenvalues(15, 0.0);
  for (std::size_t i = 3; i < 15; ++i) eigenvalues[i] = 0.4 + 0.05 * static_cast<double>(i);

  std::vector<std::vector<double>> shuffled = rows;
  Rng perm_rng(7);
  perm_rng.shuffle(shuffled);
  const KSelectionCurve a = r_k_curve(x, eigenvalues, 2, 8, 11);
  const KSelectionCurve b = r_k_curve(from_rows(shuffled), eigenvalues, 2, 8, 11);
  CHECK(a.chosen_k == b.chosen_k);
}

TEST_CASE("eigengap_k: hand gaps") {
  CHECK(eigengap_k({0.0, 0.01, 0.02, 0.5, 0.6}, 5) == 3);
  CHECK(eigengap_k({0.0, 1.0, 2.0}, 3) == 1);  // equal gaps resolve low
}

TEST_CASE("eigengap_k: invariant under constant shifts") {
  const std::vector<double> base{0.0, 0.05, 0.4, 0.45, 0.9};
  std::vector<double> shifted(base);
  for (double& v : shifted) v += 3.25;
  CHECK(eigengap_k(base, 5) == eigengap_k(shifted, 5));
}

TEST_CASE("eigengap_k: ideal block graphs recover the component count") {
  // eigenvalues of c disconnected blocks: c zeros then a gap
  for (int c = 2; c <= 5; ++c) {
    std::vector<double> eigenvalues;
    for (int i = 0; i < c; ++i) eigenvalues.push_back(0.0);
    for (int i = 0; i < 6; ++i) eigenvalues.push_back(1.2 + 0.1 * i);
    CHECK(eigengap_k(eigenvalues, static_cast<int>(eigenvalues.size())) == c);
  }
}
