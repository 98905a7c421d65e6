#pragma once

#include <Eigen/Dense>

#include "gfluct/graphon.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/statistics.hpp"

namespace gfluct {

// Large-n covariance limits of the statistic vector. Under iid-uniform labels
// the same-pattern entry factorises into a simplex integral of phi_i*phi_j
// and a box integral carrying the kappa(1-kappa) edge variances; under
// lattice labels everything collapses onto the ordered simplex. Pairs of
// distinct patterns have limit exactly 0, as do lattice pairs involving a
// single-vertex spec.
double limit_covariance_iid(const StatisticSpec& spec_i, const StatisticSpec& spec_j,
                            const Graphon& kappa);
double limit_covariance_lattice(const StatisticSpec& spec_i, const StatisticSpec& spec_j,
                                const Graphon& kappa);

// Exact integral over the ordered simplex {t_1 <= ... <= t_k} of the product
// of per-coordinate step factors times prod over edges of g(kappa(t_v,t_w)),
// where g(x) = x(1-x) when with_edge_variance, else the factor is dropped.
// Factors must be piecewise constant.
double simplex_block_integral(const std::vector<StepFunction1D>& factors,
                              const PatternGraph& pattern, const Graphon& kappa,
                              bool with_edge_variance);

// Limit of the finite-n covariance matrix entries: the average over the
// ordered index grid converges to the mean over the simplex, i.e. k! times
// the plain simplex integral, so same-pattern entries are k! times the
// limit_covariance_* value. Supports iid-uniform and lattice schemes.
Eigen::MatrixXd sigma_limit_matrix(const std::vector<StatisticSpec>& specs,
                                   const Graphon& kappa, const LabelScheme& scheme);

}  // namespace gfluct
