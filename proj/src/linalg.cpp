#include "asc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace asc {

namespace {

constexpr double kOffDiagTol = 1e-12;
constexpr int kMaxSweeps = 100;
constexpr double kZeroClamp = 1e-10;

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double off_diagonal_frobenius(const Matrix& a) {
  const std::size_t n = a.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::invalid_argument: return "invalid_argument";
    case Status::dimension_mismatch: return "dimension_mismatch";
    case Status::io_error: return "io_error";
    case Status::parse_error: return "parse_error";
    case Status::numeric_error: return "numeric_error";
  }
  return "unknown";
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  return squared_distance(a.data(), b.data(), a.size());
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

std::vector<double> Matrix::row(std::size_t i) const {
  return std::vector<double>(row_ptr(i), row_ptr(i) + cols_);
}

SymMatrix SymMatrix::from_matrix(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw Error(Status::invalid_argument, "symmetric matrix must be square and non-empty");
  double max_abs = 0.0;
  for (double v : m.data()) {
    if (!std::isfinite(v))
      throw Error(Status::invalid_argument, "symmetric matrix has non-finite entries");
    max_abs = std::max(max_abs, std::abs(v));
  }
  const double tol = 1e-12 * std::max(1.0, max_abs);
  SymMatrix out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw Error(Status::invalid_argument,
                    "matrix is not symmetric at (" + std::to_string(i) + "," +
                        std::to_string(j) + "): |" + std::to_string(m(i, j)) + " - " +
                        std::to_string(m(j, i)) + "| exceeds tolerance");
      out.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    }
  }
  return out;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < order(); ++i) t += (*this)(i, i);
  return t;
}

SpectralDecomposition sym_eigen(const SymMatrix& m) {
  const std::size_t n = m.order();
  Matrix a = m.matrix();
  Matrix q = Matrix::identity(n);

  const double scale = std::max(1.0, frobenius(a));
  const double stop = kOffDiagTol * scale;

  int sweep = 0;
  double off = off_diagonal_frobenius(a);
  while (off > stop) {
    if (sweep++ >= kMaxSweeps)
      throw Error(Status::numeric_error,
                  "jacobi sweeps exhausted; off-diagonal residual " + std::to_string(off));
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apq = a(p, r);
        if (apq == 0.0) continue;
        const double theta = (a(r, r) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e154) {
          t = 0.5 / theta;  // avoids overflow in theta*theta
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(r, r) += t * apq;
        a(p, r) = 0.0;
        a(r, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != p && i != r) {
            const double aip = a(i, p);
            const double air = a(i, r);
            a(i, p) = aip - s * (air + tau * aip);
            a(p, i) = a(i, p);
            a(i, r) = air + s * (aip - tau * air);
            a(r, i) = a(i, r);
          }
          const double qip = q(i, p);
          const double qir = q(i, r);
          q(i, p) = qip - s * (qir + tau * qip);
          q(i, r) = qir + s * (qip - tau * qir);
        }
      }
    }
    off = off_diagonal_frobenius(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double lambda = a(order[k], order[k]);
    if (lambda < 0.0 && lambda >= -kZeroClamp) lambda = 0.0;
    out.eigenvalues[k] = lambda;

    // sign convention: largest-magnitude entry positive (first index on ties)
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(q(i, order[k]));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    const double sign = q(arg, order[k]) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = sign * q(i, order[k]);
  }
  return out;
}

PcaResult pca(const Matrix& x, Diagnostics* diag) {
  const std::size_t m = x.rows();
  const std::size_t k = x.cols();
  if (m < 2) throw Error(Status::invalid_argument, "pca needs at least 2 rows");
  if (k < 1) throw Error(Status::invalid_argument, "pca needs at least 1 column");
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error(Status::invalid_argument, "pca input has non-finite entries");

  std::vector<double> mean(k, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) mean[j] += x(i, j);
  for (double& v : mean) v /= static_cast<double>(m);

  SymMatrix cov(k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
      cov.set(a, b, s / static_cast<double>(m - 1));
    }
  }

  const double total = cov.trace();
  PcaResult out;
  if (total <= 0.0) {
    note(diag, "pca: zero total variance; degenerate single-component result");
    out.component_count = 1;
    out.explained_variance_ratios = {1.0};
    out.loadings = Matrix(k, 1, 0.0);
    out.loadings(0, 0) = 1.0;
    out.degenerate = true;
    return out;
  }

  SpectralDecomposition d = sym_eigen(cov);
  out.component_count = static_cast<int>(k);
  out.explained_variance_ratios.resize(k);
  out.loadings = Matrix(k, k);
  double sum = 0.0;
  std::vector<double> vars(k);
  for (std::size_t j = 0; j < k; ++j) {
    // descending variance order
    vars[j] = std::max(d.eigenvalues[k - 1 - j], 0.0);
    sum += vars[j];
  }
  for (std::size_t j = 0; j < k; ++j) {
    out.explained_variance_ratios[j] = vars[j] / sum;
    for (std::size_t i = 0; i < k; ++i)
      out.loadings(i, j) = d.eigenvectors(i, k - 1 - j);
  }
  return out;
}

}  // namespace asc
