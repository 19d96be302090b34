#pragma once

#include <string>
#include <vector>

#include "asc/common.hpp"
#include "asc/gng.hpp"
#include "asc/linalg.hpp"

namespace asc {

/// Per-neuron kernel bandwidths (distance to the K-th nearest graph neighbor).
struct LocalScales {
  std::vector<double> sigma;
};

/// Symmetric affinity over the model's edge set: zero diagonal, zero outside
/// the edges, entries in [0,1].
class AffinityMatrix {
 public:
  explicit AffinityMatrix(std::size_t order) : m_(order, order, 0.0) {}

  void set_edge(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  std::size_t order() const { return m_.rows(); }
  const Matrix& dense() const { return m_; }
  std::size_t nonzero_count() const;

 private:
  Matrix m_;
};

struct LaplacianSym {
  SymMatrix matrix;             // I - D^{-1/2} A D^{-1/2}
  std::vector<double> degrees;  // row sums of A
};

/// sigma_i = distance from neuron i to its K-th nearest direct neighbor.
/// Neurons with fewer than K neighbors fall back to the K-th nearest neuron
/// overall (diagnostic emitted); coincident neurons floor sigma at 1e-12.
LocalScales local_scales(const GngModel& model, std::size_t k = 1, Diagnostics* diag = nullptr);

/// A_ij = exp(-d^2(w_i, w_j) / (sigma_i sigma_j)) on edges, 0 elsewhere.
AffinityMatrix affinity(const GngModel& model, const LocalScales& scales,
                        Diagnostics* diag = nullptr);

/// Normalized symmetric Laplacian. Zero-degree rows become identity rows
/// (diagnostic emitted) so the decomposition stays well defined.
LaplacianSym normalized_laplacian(const AffinityMatrix& a, Diagnostics* diag = nullptr);

/// Full spectrum of the Laplacian with eigenvalues clamped into [0, 2].
SpectralDecomposition spectrum(const LaplacianSym& laplacian);

void dump_matrix_csv(const Matrix& m, const std::string& path);

}  // namespace asc
