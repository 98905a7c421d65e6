#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gfluct/graphon.hpp"
#include "gfluct/pattern_graph.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/weights.hpp"

namespace gfluct {

// One coordinate of the statistic vector: a connected pattern on the vertex
// set [k], a weight phi evaluated at the index tuple a/n and a weight psi
// evaluated at the label tuple.
struct StatisticSpec {
  std::string name;
  PatternGraph pattern;
  WeightFunction phi = WeightFunction::constant(1.0);
  WeightFunction psi = WeightFunction::constant(1.0);

  int k() const { return pattern.vertex_count(); }
  void validate() const;
};

// Number of (not necessarily injective) edge-preserving maps from F into the
// 0/1 graph. Guard: n^k <= 1e9.
std::int64_t hom_count(const PatternGraph& F, const GraphSample& sample);

// Injective homomorphism count divided by the falling factorial (n)_k.
double injective_density(const PatternGraph& F, const GraphSample& sample);

double falling_factorial(int n, int k);
double binomial(int n, int k);

// Product over the edges of F of (Y_{a_v a_w} - kappa(U_{a_v}, U_{a_w})) at a
// strictly increasing 0-based tuple; equals 1 when F has a single vertex.
double centred_indicator(const PatternGraph& F, std::span<const int> a,
                         const GraphSample& sample, const Graphon& kappa);

// Matrix X with X(v,w) = Y_vw - kappa(U_v, U_w) off the diagonal, 0 on it.
Eigen::MatrixXd centred_edge_matrix(const GraphSample& sample, const Graphon& kappa);

// Sum over strictly increasing k-tuples a of prod_c w[c][a_c] times
// prod over the position pairs of M(a_v, a_w); M may be null only when the
// edge list is empty. Shapes up to three positions use closed forms, larger
// patterns a deterministic chunked enumeration.
double pattern_weighted_sum(const std::vector<Eigen::VectorXd>& w,
                            const std::vector<std::pair<int, int>>& edges,
                            const Eigen::MatrixXd* M);

// The centred, normalised weighted sum over strictly increasing tuples for
// each spec; single-vertex specs use the exactly centred label sum.
Eigen::VectorXd statistic_vector(const std::vector<StatisticSpec>& specs,
                                 const GraphSample& sample, const Graphon& kappa);

// Exact covariance matrix of the statistic vector under the Bernoulli edge
// model: the same-pattern block carries the kappa(1-kappa) edge variance
// product, single-vertex pairs carry the label covariance, everything else
// is exactly zero.
Eigen::MatrixXd covariance_matrix(const std::vector<StatisticSpec>& specs,
                                  const LabelScheme& scheme, const Graphon& kappa, int n,
                                  const EdgeModel& model = EdgeModel::bernoulli());

// Symmetry to 1e-12, nonnegative diagonal, smallest eigenvalue >= -1e-9.
void validate_covariance(const Eigen::MatrixXd& sigma);

// Exact E psi(U_v) for a separable weight under the label scheme.
double expected_psi(const WeightFunction& psi, int coordinate, const LabelScheme& scheme,
                    int vertex, int n);

// Exact integral over [0,1]^k of psi_i * psi_j * prod over F-edges of
// kappa(1-kappa); factors may be piecewise linear.
double box_edge_variance_integral(const WeightFunction& psi_i, const WeightFunction& psi_j,
                                  const PatternGraph& F, const Graphon& kappa);

}  // namespace gfluct
