#pragma once

#include <Eigen/Dense>
#include <string>

#include "gfluct/graphon.hpp"
#include "gfluct/pattern_graph.hpp"
#include "gfluct/sampler.hpp"

namespace gfluct {

// Hypothesised success probabilities for each vertex pair of an observed
// graph, stored as a packed upper triangle.
struct ProbabilityMatrix {
  int n = 0;
  Eigen::VectorXd p;

  double operator()(int v, int w) const;
  void validate() const;

  static ProbabilityMatrix constant(int n, double value);
  // p_vw = kappa(v/n, w/n): the kernel read at the lattice points.
  static ProbabilityMatrix from_graphon_lattice(const Graphon& kappa, int n);
  static ProbabilityMatrix from_csv(const std::string& path);
};

struct GofEntry {
  std::string name;
  double raw = 0.0;       // centred weighted sum before standardisation
  double variance = 0.0;  // exact null variance of the raw sum
  double z = 0.0;
  double p_value = 0.0;   // two-sided, standard normal reference
};

double normal_two_sided_p(double z);

// Standardised centred sums against the hypothesised probabilities; each
// statistic has exact mean 0 and variance 1 under the null by construction.
GofEntry t_edge(const GraphSample& observed, const ProbabilityMatrix& prob);
GofEntry t_twostar(const GraphSample& observed, const ProbabilityMatrix& prob, int center);
GofEntry higher_order_statistic(const GraphSample& observed, const ProbabilityMatrix& prob,
                                const PatternGraph& pattern);

}  // namespace gfluct
