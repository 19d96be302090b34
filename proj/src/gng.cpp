#include "asc/gng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "asc/embed_cluster.hpp"

namespace asc {

namespace {

void check_point(const std::vector<double>& x, std::size_t dim) {
  if (x.size() != dim)
    throw Error(Status::dimension_mismatch,
                "point dimension " + std::to_string(x.size()) + " does not match model dimension " +
                    std::to_string(dim));
  for (double v : x)
    if (!std::isfinite(v)) throw Error(Status::invalid_argument, "non-finite point component");
}

}  // namespace

void GngParams::validate() const {
  if (m_target < 2) throw Error(Status::invalid_argument, "m_target must be at least 2");
  if (!(eps_b > 0.0 && eps_b < 1.0)) throw Error(Status::invalid_argument, "eps_b must be in (0,1)");
  if (!(eps_n > 0.0 && eps_n < 1.0)) throw Error(Status::invalid_argument, "eps_n must be in (0,1)");
  if (!(eps_n < eps_b)) throw Error(Status::invalid_argument, "eps_n must be smaller than eps_b");
  if (insert_interval == 0) throw Error(Status::invalid_argument, "insert_interval must be positive");
  if (max_age <= 0) throw Error(Status::invalid_argument, "max_age must be positive");
  if (!(error_split_alpha > 0.0 && error_split_alpha <= 1.0))
    throw Error(Status::invalid_argument, "error_split_alpha must be in (0,1]");
  if (!(error_decay_beta > 0.0 && error_decay_beta < 1.0))
    throw Error(Status::invalid_argument, "error_decay_beta must be in (0,1)");
  if (!(stability_tol > 0.0)) throw Error(Status::invalid_argument, "stability_tol must be positive");
  if (max_epochs == 0) throw Error(Status::invalid_argument, "max_epochs must be positive");
}

std::vector<std::size_t> GngModel::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (const GngEdge& e : edges) {
    if (e.a == i) out.push_back(e.b);
    else if (e.b == i) out.push_back(e.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t GngModel::degree(std::size_t i) const {
  std::size_t d = 0;
  for (const GngEdge& e : edges)
    if (e.a == i || e.b == i) ++d;
  return d;
}

bool GngModel::has_edge(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  for (const GngEdge& e : edges)
    if (e.a == a && e.b == b) return true;
  return false;
}

void GngModel::add_edge(std::size_t a, std::size_t b) {
  if (a == b) throw Error(Status::invalid_argument, "self edges are not allowed");
  if (a > b) std::swap(a, b);
  for (GngEdge& e : edges) {
    if (e.a == a && e.b == b) {
      e.age = 0;
      return;
    }
  }
  edges.push_back({a, b, 0});
}

void GngModel::remove_edge(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].a == a && edges[i].b == b) {
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(i));
      return;
    }
  }
}

std::size_t GngModel::component_count() const {
  const std::size_t n = neurons.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const GngEdge& e : edges) {
    std::size_t ra = find(e.a), rb = find(e.b);
    if (ra != rb) parent[ra] = rb;
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (find(i) == i) ++count;
  return count;
}

std::pair<std::size_t, std::size_t> find_bmu(const GngModel& model, const std::vector<double>& x) {
  if (model.neurons.size() < 2)
    throw Error(Status::invalid_argument, "find_bmu needs at least 2 neurons");
  check_point(x, model.dimension());

  std::size_t b1 = 0, b2 = 0;
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.neurons.size(); ++i) {
    const double d = squared_distance(model.neurons[i].position, x);
    if (d < d1) {
      d2 = d1;
      b2 = b1;
      d1 = d;
      b1 = i;
    } else if (d < d2) {
      d2 = d;
      b2 = i;
    }
  }
  return {b1, b2};
}

double adapt_step(GngModel& model, const std::vector<double>& x, const GngParams& params) {
  const auto [b1, b2] = find_bmu(model, x);
  const std::size_t dim = model.dimension();

  Neuron& winner = model.neurons[b1];
  const double win_dist = squared_distance(winner.position, x);
  winner.error += win_dist;

  // neighbors through edges existing before the winner-pair refresh
  const std::vector<std::size_t> nbrs = model.neighbors(b1);
  for (std::size_t d = 0; d < dim; ++d)
    winner.position[d] += params.eps_b * (x[d] - winner.position[d]);
  for (std::size_t j : nbrs) {
    Neuron& nb = model.neurons[j];
    for (std::size_t d = 0; d < dim; ++d)
      nb.position[d] += params.eps_n * (x[d] - nb.position[d]);
  }

  bool refreshed = false;
  const std::size_t ea = std::min(b1, b2), eb = std::max(b1, b2);
  for (GngEdge& e : model.edges) {
    if (e.a == ea && e.b == eb) {
      e.age = 0;
      refreshed = true;
    } else if (e.a == b1 || e.b == b1) {
      ++e.age;
    }
  }
  if (!refreshed) model.add_edge(b1, b2);

  std::erase_if(model.edges, [&](const GngEdge& e) { return e.age > params.max_age; });

  // drop neurons stranded without edges, never going below two neurons
  if (model.neurons.size() > 2) {
    std::vector<std::size_t> deg(model.neurons.size(), 0);
    for (const GngEdge& e : model.edges) {
      ++deg[e.a];
      ++deg[e.b];
    }
    for (std::size_t i = model.neurons.size(); i-- > 0 && model.neurons.size() > 2;) {
      if (deg[i] != 0) continue;
      model.neurons.erase(model.neurons.begin() + static_cast<std::ptrdiff_t>(i));
      for (GngEdge& e : model.edges) {
        if (e.a > i) --e.a;
        if (e.b > i) --e.b;
      }
    }
  }
  return win_dist;
}

bool insert_neuron(GngModel& model, const GngParams& params, Diagnostics* diag) {
  if (model.neurons.size() < 2)
    throw Error(Status::invalid_argument, "insert_neuron needs at least 2 neurons");

  std::size_t q = 0;
  for (std::size_t i = 1; i < model.neurons.size(); ++i)
    if (model.neurons[i].error > model.neurons[q].error) q = i;

  const std::vector<std::size_t> nbrs = model.neighbors(q);
  if (nbrs.empty()) {
    note(diag, "gng: max-error neuron has no neighbors; insertion skipped");
    return false;
  }
  std::size_t f = nbrs.front();
  for (std::size_t j : nbrs)
    if (model.neurons[j].error > model.neurons[f].error) f = j;

  const std::size_t dim = model.dimension();
  Neuron fresh;
  fresh.position.resize(dim);
  for (std::size_t d = 0; d < dim; ++d)
    fresh.position[d] = 0.5 * (model.neurons[q].position[d] + model.neurons[f].position[d]);

  model.neurons[q].error *= params.error_split_alpha;
  model.neurons[f].error *= params.error_split_alpha;
  fresh.error = model.neurons[q].error;

  model.remove_edge(q, f);
  model.neurons.push_back(std::move(fresh));
  const std::size_t fresh_idx = model.neurons.size() - 1;
  model.add_edge(fresh_idx, q);
  model.add_edge(fresh_idx, f);
  return true;
}

GngModel train(const std::vector<std::vector<double>>& data, const GngParams& params,
               Diagnostics* diag, TrainStats* stats) {
  params.validate();
  if (data.size() < 2) throw Error(Status::invalid_argument, "training needs at least 2 points");
  const std::size_t dim = data.front().size();
  if (dim == 0) throw Error(Status::invalid_argument, "points must have at least 1 dimension");
  for (const auto& x : data) check_point(x, dim);
  if (params.m_target > data.size())
    throw Error(Status::invalid_argument, "m_target exceeds the number of training points");

  bool any_distinct = false;
  for (const auto& x : data) {
    if (x != data.front()) {
      any_distinct = true;
      break;
    }
  }
  if (!any_distinct)
    throw Error(Status::invalid_argument, "training needs at least 2 distinct points");

  Rng rng(params.seed);
  const std::size_t i0 = rng.next_index(data.size());
  std::size_t i1 = i0;
  for (int tries = 0; tries < 64 && data[i1] == data[i0]; ++tries) i1 = rng.next_index(data.size());
  if (data[i1] == data[i0]) {
    // deterministic linear fallback when random draws keep landing on duplicates
    for (std::size_t j = 0; j < data.size(); ++j) {
      const std::size_t cand = (i0 + 1 + j) % data.size();
      if (data[cand] != data[i0]) {
        i1 = cand;
        break;
      }
    }
  }

  GngModel model;
  model.neurons.push_back({data[i0], 0.0});
  model.neurons.push_back({data[i1], 0.0});

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  std::size_t signal = 0;
  double prev_pass_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t epoch = 0;
  bool stable = false;
  double pass_error = 0.0;

  for (epoch = 1; epoch <= params.max_epochs; ++epoch) {
    rng.shuffle(order);
    double acc = 0.0;
    for (std::size_t idx : order) {
      ++signal;
      acc += adapt_step(model, data[idx], params);
      if (signal % params.insert_interval == 0 && model.neurons.size() < params.m_target)
        insert_neuron(model, params, diag);
    }
    for (Neuron& nrn : model.neurons) nrn.error *= params.error_decay_beta;

    pass_error = acc / static_cast<double>(data.size());
    if (model.neurons.size() == params.m_target && !std::isnan(prev_pass_error)) {
      const double hi = std::max(prev_pass_error, pass_error);
      if (hi <= 1e-15 || std::abs(pass_error - prev_pass_error) <= params.stability_tol * hi) {
        stable = true;
        break;
      }
    }
    prev_pass_error = pass_error;
  }

  if (!stable) note(diag, "gng: epoch cap reached before quantization error stabilized");
  if (stats) {
    stats->epochs = std::min(epoch, params.max_epochs);
    stats->final_pass_error = pass_error;
    stats->stable = stable;
  }
  return model;
}

double quantization_error(const GngModel& model, const std::vector<std::vector<double>>& data) {
  if (data.empty()) throw Error(Status::invalid_argument, "quantization_error needs data");
  if (model.neurons.empty()) throw Error(Status::invalid_argument, "model has no neurons");
  const std::size_t dim = model.dimension();
  double acc = 0.0;
  for (const auto& x : data) {
    check_point(x, dim);
    double best = std::numeric_limits<double>::infinity();
    for (const Neuron& nrn : model.neurons)
      best = std::min(best, squared_distance(nrn.position, x));
    acc += best;
  }
  return acc / static_cast<double>(data.size());
}

int elbow_index(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 3 || ys.size() != n) return -1;
  const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
  const double xspan = *xmax_it - *xmin_it;
  const double yspan = *ymax_it - *ymin_it;
  if (xspan <= 0.0 || yspan <= 1e-12 * std::max(1.0, std::abs(*ymax_it))) return -1;

  auto nx = [&](std::size_t i) { return (xs[i] - *xmin_it) / xspan; };
  auto ny = [&](std::size_t i) { return (ys[i] - *ymin_it) / yspan; };
  const double x0 = nx(0), y0 = ny(0);
  const double dx = nx(n - 1) - x0, dy = ny(n - 1) - y0;
  const double len = std::sqrt(dx * dx + dy * dy);
  if (len <= 0.0) return -1;

  int best = -1;
  double best_dist = 1e-9;  // collinear curves stay degenerate
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dist = std::abs(dx * (ny(i) - y0) - dy * (nx(i) - x0)) / len;
    if (dist > best_dist) {
      best_dist = dist;
      best = static_cast<int>(i);
    }
  }
  return best;
}

ElbowResult select_m_elbow(const std::vector<std::vector<double>>& data,
                           const std::vector<int>& candidates, std::uint64_t seed,
                           const ElbowOptions& options, Diagnostics* diag) {
  if (data.empty()) throw Error(Status::invalid_argument, "select_m_elbow needs data");
  ElbowResult out;
  for (int c : candidates) {
    if (c < 2) throw Error(Status::invalid_argument, "elbow candidates must be >= 2");
    if (!out.candidates.empty() && c <= out.candidates.back())
      throw Error(Status::invalid_argument, "elbow candidates must be strictly ascending");
    if (static_cast<std::size_t>(c) > data.size()) {
      note(diag, "elbow: candidate " + std::to_string(c) + " exceeds point count; skipped");
      continue;
    }
    out.candidates.push_back(c);
  }
  if (out.candidates.size() < 3)
    throw Error(Status::invalid_argument, "select_m_elbow needs at least 3 usable candidates");

  Matrix x(data.size(), data.front().size());
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < data[i].size(); ++j) x(i, j) = data[i][j];

  KMeansOptions kopts;
  kopts.restarts = options.restarts;
  kopts.max_iterations = options.max_iterations;
  std::vector<double> xs;
  for (int c : out.candidates) {
    const KMeansResult r = kmeans(x, c, Rng::stream(seed, static_cast<std::uint64_t>(c)).next_u64(),
                                  kopts, diag);
    out.errors.push_back(r.inertia / static_cast<double>(data.size()));
    xs.push_back(static_cast<double>(c));
  }

  const int idx = elbow_index(xs, out.errors);
  if (idx < 0) {
    note(diag, "elbow: flat or collinear quantization-error curve; using smallest candidate");
    out.degenerate = true;
    out.selected = out.candidates.front();
  } else {
    out.selected = out.candidates[static_cast<std::size_t>(idx)];
  }
  return out;
}

void dump_model_csv(const GngModel& model, const std::string& neurons_path,
                    const std::string& edges_path) {
  std::ofstream nf(neurons_path);
  if (!nf) throw Error(Status::io_error, "cannot open " + neurons_path + " for writing");
  const std::size_t dim = model.dimension();
  for (std::size_t d = 0; d < dim; ++d) nf << "x" << d << ",";
  nf << "error\n";
  nf.precision(17);
  for (const Neuron& nrn : model.neurons) {
    for (double v : nrn.position) nf << v << ",";
    nf << nrn.error << "\n";
  }

  std::ofstream ef(edges_path);
  if (!ef) throw Error(Status::io_error, "cannot open " + edges_path + " for writing");
  ef << "a,b,age\n";
  for (const GngEdge& e : model.edges) ef << e.a << "," << e.b << "," << e.age << "\n";
}

}  // namespace asc
