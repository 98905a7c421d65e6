#include "gfluct/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gfluct/errors.hpp"
#include "gfluct/reduction.hpp"
#include "gfluct/rng.hpp"

namespace gfluct {

void ExperimentConfig::validate() const {
  if (!kappa.nondegenerate())
    throw ConfigError("experiment: kernel is identically 0 or 1");
  if (specs.empty()) throw ConfigError("experiment: no statistic specs");
  for (const auto& s : specs) s.validate();
  if (n_grid.empty()) throw ConfigError("experiment: empty n grid");
  for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
    if (n_grid[i] >= n_grid[i + 1])
      throw ConfigError("experiment: n grid must be strictly increasing");
}

Eigen::MatrixXd monte_carlo_statistics(const std::vector<StatisticSpec>& specs,
                                       const Graphon& kappa, const LabelScheme& scheme,
                                       const EdgeModel& model, int n, int replications,
                                       std::uint64_t seed) {
  const int d = static_cast<int>(specs.size());
  Eigen::MatrixXd out(replications, d);
  parallel_for_chunks(static_cast<std::size_t>(replications), [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_key(seed, StreamKind::kReplication,
                                              static_cast<std::uint64_t>(n),
                                              static_cast<std::uint64_t>(r));
    const auto sample = sample_graph(kappa, scheme, model, n, rep_seed);
    out.row(static_cast<Eigen::Index>(r)) = statistic_vector(specs, sample, kappa).transpose();
  });
  return out;
}

double ks_distance_to_normal(std::vector<double> samples, double sigma) {
  if (samples.empty()) throw ConfigError("ks distance: empty sample");
  if (!(sigma > 0.0)) throw ConfigError("ks distance: nonpositive scale");
  std::sort(samples.begin(), samples.end());
  const double r = static_cast<double>(samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-samples[i] / (sigma * std::sqrt(2.0)));
    const double hi = (static_cast<double>(i) + 1.0) / r - cdf;
    const double lo = cdf - static_cast<double>(i) / r;
    ks = std::max(ks, std::max(hi, lo));
  }
  return ks;
}

CltReport run_clt_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.replications < 100)
    throw ConfigError("clt experiment: needs at least 100 replications");
  if (config.model.kind != EdgeModelKind::kBernoulli)
    throw ConfigError("clt experiment: the exact covariance targets assume Bernoulli edges");
  const int d = static_cast<int>(config.specs.size());
  const int reps = config.replications;

  CltReport report;
  for (int n : config.n_grid) {
    const auto t0 = std::chrono::steady_clock::now();
    CltRow row;
    row.n = n;
    row.target = covariance_matrix(config.specs, config.scheme, config.kappa, n);
    for (int i = 0; i < d; ++i)
      if (!(row.target(i, i) > 1e-14))
        throw ConfigError("clt experiment: degenerate target variance for spec '" +
                          config.specs[static_cast<std::size_t>(i)].name + "'");

    const Eigen::MatrixXd obs = monte_carlo_statistics(config.specs, config.kappa,
                                                       config.scheme, config.model, n, reps,
                                                       config.seed);

    // Deterministic reductions: fixed replication order, pairwise sums.
    row.emp_mean.resize(d);
    std::vector<double> buf(static_cast<std::size_t>(reps));
    for (int i = 0; i < d; ++i) {
      for (int r = 0; r < reps; ++r) buf[static_cast<std::size_t>(r)] = obs(r, i);
      row.emp_mean[i] = pairwise_sum(buf) / reps;
    }
    row.emp_cov.resize(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        for (int r = 0; r < reps; ++r)
          buf[static_cast<std::size_t>(r)] =
              (obs(r, i) - row.emp_mean[i]) * (obs(r, j) - row.emp_mean[j]);
        const double c = pairwise_sum(buf) / (reps - 1.0);
        row.emp_cov(i, j) = c;
        row.emp_cov(j, i) = c;
      }

    row.ks.resize(d);
    for (int i = 0; i < d; ++i) {
      std::vector<double> col(static_cast<std::size_t>(reps));
      for (int r = 0; r < reps; ++r) col[static_cast<std::size_t>(r)] = obs(r, i);
      row.ks[i] = ks_distance_to_normal(std::move(col), std::sqrt(row.target(i, i)));
    }

    row.max_cross_z = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const double se = std::sqrt((row.target(i, i) * row.target(j, j) +
                                     row.target(i, j) * row.target(i, j)) /
                                    (reps - 1.0));
        row.max_cross_z =
            std::max(row.max_cross_z, std::abs(row.emp_cov(i, j) - row.target(i, j)) / se);
      }

    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(std::move(row));
  }
  return report;
}

ConvergenceReport run_convergence_study(const ExperimentConfig& config) {
  config.validate();
  ConvergenceReport report;
  report.sigma_limit = sigma_limit_matrix(config.specs, config.kappa, config.scheme);
  for (int n : config.n_grid) {
    ConvergenceRow row;
    row.n = n;
    row.sigma_n = covariance_matrix(config.specs, config.scheme, config.kappa, n);
    row.gap = (row.sigma_n - report.sigma_limit).cwiseAbs();
    row.max_gap = row.gap.maxCoeff();
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace gfluct
