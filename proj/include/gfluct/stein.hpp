#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gfluct/graphon.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/statistics.hpp"
#include "gfluct/weights.hpp"

namespace gfluct {

// Tuples b of size k_j sharing at least min(2, k_i) indices with a (tuples
// read as unordered sets); empty whenever k_i >= 2 and k_j = 1.
std::vector<std::vector<int>> neighborhood(int k_i, std::span<const int> a, int k_j, int n);

// One summand of the statistic vector: binom(n,k)^{-1/2} phi(a/n) Phi T at a
// strictly increasing 0-based tuple.
double coupling_summand(const StatisticSpec& spec, std::span<const int> a,
                        const GraphSample& sample, const Graphon& kappa);

struct CouplingRealisation {
  int index = 0;            // chosen coordinate I
  std::vector<int> tuple;   // chosen tuple A (0-based, increasing)
  Eigen::VectorXd w;
  Eigen::VectorXd w_prime;  // W with the tuple's overlapping summands removed
  Eigen::VectorXd direction;  // supported on coordinate I only
};

CouplingRealisation draw_coupling(const std::vector<StatisticSpec>& specs,
                                  const GraphSample& sample, const Graphon& kappa,
                                  std::uint64_t seed);

struct SteinCheckRow {
  std::string monomial;  // e.g. "w0^2*w1"
  int coordinate = 0;    // which g-coordinate carries the monomial
  double lhs = 0.0;      // E{G^t g(W') - G^t g(W)}
  double rhs = 0.0;      // E{W^t g(W)}
  double residual = 0.0;
};

struct SteinReport {
  int n = 0;
  int d = 0;
  std::vector<SteinCheckRow> rows;
  double max_residual = 0.0;
  Eigen::MatrixXd gd;     // E{G_i D_j} by total enumeration
  Eigen::MatrixXd sigma;  // exact covariance of W
  double max_gd_gap = 0.0;
};

// Evaluates both sides of the coupling identity as exact finite sums over all
// label atoms and edge configurations, for every coordinate monomial up to
// max_degree. Requires a deterministic or finite-atom label scheme and at
// most 20 vertex pairs.
SteinReport verify_stein_identity_exact(const std::vector<StatisticSpec>& specs,
                                        const Graphon& kappa, int n,
                                        const LabelScheme& scheme, int max_degree = 3);

struct Chaos4Result {
  int n = 0;
  long replications = 0;
  double estimate4 = 0.0;
  double se4 = 0.0;
  double estimate2 = 0.0;
  double se2 = 0.0;
  double exact2 = 0.0;   // exact second moment of the wedge form
  double target4 = 0.0;  // the paired double-sum formula, 3 (E F^2)^2
  double exact4 = 0.0;   // full fourth moment 3 k2^2 + 48 v^4 tr(M^4); NaN when skipped
};

// Gaussian wedge-sum experiment: X_ij iid N(0, n^-2), F = sum over ordered
// triples of sqrt(n) phi(i/n,j/n,k/n) X_ij X_jk; phi must satisfy
// int_{D_3} phi^2 = 1. The fourth moment approaches 3 as n grows.
Chaos4Result fourth_moment_experiment(int n, long replications, const WeightFunction& phi,
                                      std::uint64_t seed);

}  // namespace gfluct
