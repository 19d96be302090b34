#include "asc/spectral_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace asc {

namespace {
constexpr double kSigmaFloor = 1e-12;
}

std::size_t AffinityMatrix::nonzero_count() const {
  std::size_t count = 0;
  for (double v : m_.data())
    if (v != 0.0) ++count;
  return count;
}

LocalScales local_scales(const GngModel& model, std::size_t k, Diagnostics* diag) {
  const std::size_t m = model.neurons.size();
  if (k == 0) throw Error(Status::invalid_argument, "local_scales needs K >= 1");
  if (m < k + 1)
    throw Error(Status::invalid_argument, "local_scales needs more than K neurons");

  LocalScales out;
  out.sigma.resize(m);
  std::vector<double> dists;
  for (std::size_t i = 0; i < m; ++i) {
    dists.clear();
    for (std::size_t j : model.neighbors(i))
      dists.push_back(std::sqrt(squared_distance(model.neurons[i].position, model.neurons[j].position)));

    if (dists.size() < k) {
      note(diag, "local_scales: neuron " + std::to_string(i) + " has " +
                     std::to_string(dists.size()) + " neighbors (< K); using global fallback");
      dists.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        dists.push_back(std::sqrt(squared_distance(model.neurons[i].position, model.neurons[j].position)));
      }
    }
    std::sort(dists.begin(), dists.end());
    double sigma = dists[k - 1];
    if (sigma < kSigmaFloor) {
      note(diag, "local_scales: neuron " + std::to_string(i) +
                     " is coincident with its scale neighbor; sigma floored");
      sigma = kSigmaFloor;
    }
    out.sigma[i] = sigma;
  }
  return out;
}

AffinityMatrix affinity(const GngModel& model, const LocalScales& scales, Diagnostics*) {
  const std::size_t m = model.neurons.size();
  if (scales.sigma.size() != m)
    throw Error(Status::dimension_mismatch, "scale count does not match neuron count");
  for (double s : scales.sigma)
    if (!(s > 0.0)) throw Error(Status::invalid_argument, "scales must be strictly positive");

  AffinityMatrix a(m);
  for (const GngEdge& e : model.edges) {
    const double d2 = squared_distance(model.neurons[e.a].position, model.neurons[e.b].position);
    a.set_edge(e.a, e.b, std::exp(-d2 / (scales.sigma[e.a] * scales.sigma[e.b])));
  }
  return a;
}

LaplacianSym normalized_laplacian(const AffinityMatrix& a, Diagnostics* diag) {
  const std::size_t m = a.order();
  std::vector<double> degrees(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) degrees[i] += a(j, i);

  std::vector<double> inv_sqrt(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (degrees[i] > 0.0) {
      inv_sqrt[i] = 1.0 / std::sqrt(degrees[i]);
    } else {
      note(diag, "laplacian: node " + std::to_string(i) + " has zero degree; identity row used");
    }
  }

  SymMatrix l(m);
  for (std::size_t i = 0; i < m; ++i) {
    l.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = a(i, j);
      if (v != 0.0) l.set(i, j, -v * inv_sqrt[i] * inv_sqrt[j]);
    }
  }
  return {std::move(l), std::move(degrees)};
}

namespace {

// Connected components over the Laplacian's off-diagonal structure, restricted
// to positive-degree nodes (identity rows sit at eigenvalue 1, not 0).
std::vector<std::vector<std::size_t>> positive_degree_components(const LaplacianSym& laplacian) {
  const std::size_t m = laplacian.matrix.order();
  std::vector<std::size_t> parent(m);
  for (std::size_t i = 0; i < m; ++i) parent[i] = i;
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (laplacian.matrix(i, j) != 0.0) parent[find(i)] = find(j);

  std::vector<std::vector<std::size_t>> components;
  std::vector<int> id(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(laplacian.degrees[i] > 0.0)) continue;
    const std::size_t root = find(i);
    if (id[root] < 0) {
      id[root] = static_cast<int>(components.size());
      components.emplace_back();
    }
    components[static_cast<std::size_t>(id[root])].push_back(i);
  }
  return components;
}

}  // namespace

SpectralDecomposition spectrum(const LaplacianSym& laplacian) {
  SpectralDecomposition d = sym_eigen(laplacian.matrix);
  for (double& v : d.eigenvalues) v = std::clamp(v, 0.0, 2.0);

  // A zero eigenvalue of multiplicity c leaves the solver free to return any
  // rotation of the nullspace. Replace that block with its canonical basis,
  // the degree-scaled component indicators, so downstream scoring sees one
  // eigenvector per component regardless of round-off.
  std::size_t zeros = 0;
  while (zeros < d.eigenvalues.size() && d.eigenvalues[zeros] < 1e-8) ++zeros;
  if (zeros >= 2) {
    const auto components = positive_degree_components(laplacian);
    if (components.size() == zeros) {
      for (std::size_t c = 0; c < components.size(); ++c) {
        double weight = 0.0;
        for (std::size_t i : components[c]) weight += laplacian.degrees[i];
        const double norm = 1.0 / std::sqrt(weight);
        for (std::size_t i = 0; i < d.eigenvectors.rows(); ++i) d.eigenvectors(i, c) = 0.0;
        for (std::size_t i : components[c])
          d.eigenvectors(i, c) = std::sqrt(laplacian.degrees[i]) * norm;
        d.eigenvalues[c] = 0.0;
      }
    }
  }
  return d;
}

void dump_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");
  f.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) f << ",";
      f << m(i, j);
    }
    f << "\n";
  }
}

}  // namespace asc
