#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "asc/common.hpp"

namespace asc {

struct Neuron {
  std::vector<double> position;
  double error = 0.0;  // accumulated squared distance of won signals
};

/// Undirected edge between neurons a and b, stored with a < b.
struct GngEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  int age = 0;
};

struct GngParams {
  std::size_t m_target = 100;       // neuron count to grow to
  double eps_b = 0.05;              // winner learning rate
  double eps_n = 0.02;              // neighbor learning rate
  std::size_t insert_interval = 100;  // grow every l signals
  int max_age = 20;                 // edges older than this are pruned
  double error_split_alpha = 0.5;   // error scaling at insertion
  double error_decay_beta = 0.995;  // per-pass multiplicative error decay
  double stability_tol = 1e-3;      // relative pass-mean quantization error change
  std::size_t max_epochs = 200;
  std::uint64_t seed = 0;

  void validate() const;  // throws Error(invalid_argument) on bad settings
};

/// Trained vector-quantization graph: neuron positions plus the aged edge set
/// that later stages treat as the similarity graph.
class GngModel {
 public:
  std::vector<Neuron> neurons;
  std::vector<GngEdge> edges;

  std::size_t dimension() const { return neurons.empty() ? 0 : neurons.front().position.size(); }

  std::vector<std::size_t> neighbors(std::size_t i) const;
  std::size_t degree(std::size_t i) const;
  bool has_edge(std::size_t a, std::size_t b) const;

  /// Adds edge (a,b) with age 0, or resets its age if already present.
  void add_edge(std::size_t a, std::size_t b);
  void remove_edge(std::size_t a, std::size_t b);

  /// Number of connected components of the edge graph (isolated neurons count).
  std::size_t component_count() const;
};

/// Indices of the nearest and second-nearest neuron to x (ties -> lower index).
std::pair<std::size_t, std::size_t> find_bmu(const GngModel& model, const std::vector<double>& x);

/// One signal presentation: accumulate winner error, move winner and its
/// topological neighbors, refresh/create the winner pair edge, age and prune
/// the winner's other edges, drop neurons left without edges (while more than
/// two remain). Returns the winner's squared distance before adaptation.
double adapt_step(GngModel& model, const std::vector<double>& x, const GngParams& params);

/// Splits the highest-error region: new neuron at the midpoint of the
/// max-error neuron and its max-error neighbor. Returns false (with a
/// diagnostic) when the max-error neuron has no neighbors.
bool insert_neuron(GngModel& model, const GngParams& params, Diagnostics* diag = nullptr);

struct TrainStats {
  std::size_t epochs = 0;
  double final_pass_error = 0.0;  // pass-mean quantization error of last epoch
  bool stable = false;            // stopped on stability rather than epoch cap
};

/// Grows a model on the data: two seed neurons at distinct random points,
/// seeded-random presentation order per pass, insertion every insert_interval
/// signals until m_target neurons, per-pass error decay. Stops once the
/// neuron count is m_target and the pass-mean quantization error is stable,
/// or at max_epochs. Deterministic for a fixed seed.
GngModel train(const std::vector<std::vector<double>>& data, const GngParams& params,
               Diagnostics* diag = nullptr, TrainStats* stats = nullptr);

/// Mean squared distance from each point to its nearest neuron.
double quantization_error(const GngModel& model, const std::vector<std::vector<double>>& data);

struct ElbowOptions {
  int restarts = 2;
  int max_iterations = 100;
};

struct ElbowResult {
  int selected = 0;
  std::vector<int> candidates;
  std::vector<double> errors;  // k-means quantization error per candidate
  bool degenerate = false;     // flat or collinear curve
};

/// Index into (xs, ys) of the point farthest from the chord joining the first
/// and last points, after min-max normalizing both axes. Returns -1 when the
/// curve is flat or collinear.
int elbow_index(const std::vector<double>& xs, const std::vector<double>& ys);

/// Picks a representative count from a quantization-error curve: runs seeded
/// k-means++ for every candidate size and returns the elbow of the error
/// curve. Degenerate (flat/collinear) curves fall back to the smallest
/// candidate with a diagnostic.
ElbowResult select_m_elbow(const std::vector<std::vector<double>>& data,
                           const std::vector<int>& candidates, std::uint64_t seed,
                           const ElbowOptions& options = {}, Diagnostics* diag = nullptr);

/// Debug dump: neuron positions with errors, and the edge list (a,b,age).
void dump_model_csv(const GngModel& model, const std::string& neurons_path,
                    const std::string& edges_path);

}  // namespace asc
