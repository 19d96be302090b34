#pragma once

#include <cstddef>
#include <vector>

#include "asc/common.hpp"

namespace asc {

/// Dense row-major matrix of doubles. Sized for the small (order up to a few
/// hundred) problems this library works on; no attempt at sparse storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }

  std::vector<double> column(std::size_t j) const;
  std::vector<double> row(std::size_t i) const;
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix. Construction validates symmetry (1e-12 scaled tolerance)
/// and finiteness, then stores the exactly-symmetrized average.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t n) : m_(n, n, 0.0) {}

  /// Validates and symmetrizes an arbitrary square matrix.
  static SymMatrix from_matrix(const Matrix& m);

  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  std::size_t order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double trace() const;

 private:
  Matrix m_;
};

/// Full eigendecomposition of a symmetric matrix: eigenvalues ascending,
/// eigenvector column i paired with eigenvalue i, columns orthonormal.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

/// Cyclic Jacobi eigensolver. Sweeps rotations until the off-diagonal
/// Frobenius norm falls below 1e-12 (relative to the matrix norm), capped at
/// 100 sweeps. Eigenvalues within -1e-10 of zero are clamped to zero, and each
/// eigenvector's largest-magnitude entry is made positive so repeated runs and
/// downstream histograms are reproducible.
SpectralDecomposition sym_eigen(const SymMatrix& m);

struct PcaResult {
  int component_count = 0;
  std::vector<double> explained_variance_ratios;  // descending, sums to 1
  Matrix loadings;                                // column i is component i
  bool degenerate = false;                        // zero total variance
};

/// Principal components of the column-centered input (rows are observations),
/// via eigendecomposition of the column covariance. Zero total variance yields
/// a flagged single-component result instead of an error.
PcaResult pca(const Matrix& x, Diagnostics* diag = nullptr);

}  // namespace asc
