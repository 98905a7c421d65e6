#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gfluct/graphon.hpp"
#include "gfluct/limit_covariance.hpp"
#include "gfluct/sampler.hpp"
#include "gfluct/statistics.hpp"

namespace gfluct {

struct ExperimentConfig {
  Graphon kappa = Graphon::constant(0.5);
  LabelScheme scheme;
  EdgeModel model;
  std::vector<StatisticSpec> specs;
  std::vector<int> n_grid;
  int replications = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

// One row of replicated statistic vectors per replication; replication r is
// generated from streams keyed by (seed, n, r), so the matrix is identical
// for any worker count.
Eigen::MatrixXd monte_carlo_statistics(const std::vector<StatisticSpec>& specs,
                                       const Graphon& kappa, const LabelScheme& scheme,
                                       const EdgeModel& model, int n, int replications,
                                       std::uint64_t seed);

// One-sample Kolmogorov distance between the sample and N(0, sigma^2).
double ks_distance_to_normal(std::vector<double> samples, double sigma);

struct CltRow {
  int n = 0;
  Eigen::VectorXd emp_mean;
  Eigen::MatrixXd emp_cov;
  Eigen::MatrixXd target;   // exact finite-n covariance
  Eigen::VectorXd ks;       // per coordinate, against N(0, target_ii)
  double max_cross_z = 0.0; // largest |emp - target| cross-covariance z-score
  double seconds = 0.0;     // wall clock; reporting only, never written to files
};

struct CltReport {
  std::vector<CltRow> rows;
};

CltReport run_clt_experiment(const ExperimentConfig& config);

struct ConvergenceRow {
  int n = 0;
  Eigen::MatrixXd sigma_n;
  Eigen::MatrixXd gap;  // |sigma_n - sigma_limit| entrywise
  double max_gap = 0.0;
};

struct ConvergenceReport {
  Eigen::MatrixXd sigma_limit;
  std::vector<ConvergenceRow> rows;
};

// Exact finite-n covariances against their large-n limits; no sampling.
ConvergenceReport run_convergence_study(const ExperimentConfig& config);

}  // namespace gfluct
