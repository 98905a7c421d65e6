#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gfluct/graphon.hpp"

namespace gfluct {

struct DiscreteDistribution {
  Eigen::VectorXd atoms;  // points in [0,1]
  Eigen::VectorXd probs;  // nonnegative, sums to 1 within 1e-12

  void validate() const;
  double mean() const { return atoms.dot(probs); }
};

enum class LabelSchemeKind { kIidUniform, kLattice, kDiscrete };

// How the vertex labels U_1..U_n are produced: iid uniform, the fixed lattice
// i/n, or independent draws from finite distributions (a single shared
// distribution, or one per vertex).
class LabelScheme {
 public:
  static LabelScheme iid_uniform();
  static LabelScheme lattice();
  static LabelScheme discrete(DiscreteDistribution dist);
  static LabelScheme discrete_per_vertex(std::vector<DiscreteDistribution> dists);

  LabelSchemeKind kind() const { return kind_; }
  bool deterministic() const { return kind_ == LabelSchemeKind::kLattice; }
  bool shared_distribution() const { return dists_.size() == 1; }
  const DiscreteDistribution& distribution(int vertex) const;
  const std::vector<DiscreteDistribution>& distributions() const { return dists_; }

  std::string to_text() const;
  static LabelScheme from_text(const std::string& text);

 private:
  LabelSchemeKind kind_ = LabelSchemeKind::kIidUniform;
  std::vector<DiscreteDistribution> dists_;  // discrete only; size 1 = shared
};

enum class EdgeModelKind { kBernoulli, kBoundedBeta };

// Conditional law of an edge value given the labels; the conditional mean is
// always kappa(U_v, U_w).
struct EdgeModel {
  EdgeModelKind kind = EdgeModelKind::kBernoulli;
  double concentration = 0.0;  // BoundedBeta only

  static EdgeModel bernoulli() { return {}; }
  static EdgeModel bounded_beta(double c);
  std::string to_text() const;
};

// One realisation: n, labels, packed upper-triangular edge values, plus the
// scheme/model/seed it was drawn with. Immutable after construction.
struct GraphSample {
  int n = 0;
  Eigen::VectorXd labels;
  Eigen::VectorXd edges;  // index pair_index(v,w,n) for 0 <= v < w < n
  LabelScheme scheme;
  EdgeModel model;
  std::uint64_t seed = 0;

  static std::size_t pair_index(int v, int w, int n);
  double edge(int v, int w) const;
  bool is_binary() const;
};

Eigen::VectorXd sample_labels(const LabelScheme& scheme, int n, std::uint64_t seed);

GraphSample sample_graph(const Graphon& kappa, const LabelScheme& scheme,
                         const EdgeModel& model, int n, std::uint64_t seed);

// Same, with the labels fixed by the caller (the scheme is recorded as-is).
GraphSample sample_graph_with_labels(const Graphon& kappa, const Eigen::VectorXd& labels,
                                     const LabelScheme& scheme, const EdgeModel& model,
                                     std::uint64_t seed);

// Edge-list text format: header "n=<n> scheme=<text> seed=<seed>", then one
// "v w y" line per vertex pair with 1-based vertices. Labels use "v u" lines.
void write_edge_list(const GraphSample& sample, const std::string& path);
void write_labels(const GraphSample& sample, const std::string& path);
GraphSample read_edge_list(const std::string& edge_path, const std::string& label_path = "");

}  // namespace gfluct
