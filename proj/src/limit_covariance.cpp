#include "gfluct/limit_covariance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gfluct/errors.hpp"

namespace gfluct {

namespace {

StepFunction1D factor_or_constant(const WeightFunction& w, int c) {
  if (w.is_constant()) return StepFunction1D::constant(c == 0 ? w.constant_value() : 1.0);
  return w.factors()[static_cast<std::size_t>(c)];
}

void require_piecewise_constant(const WeightFunction& w, const char* what) {
  if (!w.piecewise_constant())
    throw ConfigError(std::string(what) +
                      ": sloped weight factors are only integrable exactly in one dimension");
}

// Pointwise product of per-coordinate factors from several weights, merged
// onto a common breakpoint set.
StepFunction1D merged_factor(const std::vector<const WeightFunction*>& ws, int c) {
  std::vector<double> pts;
  for (const WeightFunction* w : ws) {
    const StepFunction1D f = factor_or_constant(*w, c);
    pts.insert(pts.end(), f.boundaries.data(), f.boundaries.data() + f.boundaries.size());
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  StepFunction1D merged;
  merged.boundaries = Eigen::Map<Eigen::VectorXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
  merged.values.resize(static_cast<Eigen::Index>(pts.size()) - 1);
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const double midp = 0.5 * (pts[s] + pts[s + 1]);
    double v = 1.0;
    for (const WeightFunction* w : ws) v *= w->factor_at(c, midp);
    merged.values[static_cast<Eigen::Index>(s)] = v;
  }
  return merged;
}

}  // namespace

double simplex_block_integral(const std::vector<StepFunction1D>& factors,
                              const PatternGraph& pattern, const Graphon& kappa,
                              bool with_edge_variance) {
  const int k = static_cast<int>(factors.size());
  for (const auto& f : factors)
    if (!f.piecewise_constant())
      throw ConfigError("simplex integral: factors must be piecewise constant");

  // Shared merged partition: the simplex couples the coordinates, so every
  // coordinate is refined by every breakpoint in play.
  std::vector<double> pts(kappa.boundaries().data(),
                          kappa.boundaries().data() + kappa.boundaries().size());
  for (const auto& f : factors)
    pts.insert(pts.end(), f.boundaries.data(), f.boundaries.data() + f.boundaries.size());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const int m = static_cast<int>(pts.size()) - 1;

  std::vector<double> width(static_cast<std::size_t>(m));
  std::vector<double> mid(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) {
    width[static_cast<std::size_t>(s)] = pts[static_cast<std::size_t>(s) + 1] - pts[static_cast<std::size_t>(s)];
    mid[static_cast<std::size_t>(s)] = 0.5 * (pts[static_cast<std::size_t>(s)] + pts[static_cast<std::size_t>(s) + 1]);
  }

  std::vector<std::pair<int, int>> edges;
  for (const auto& e : pattern.edges()) edges.emplace_back(e.first - 1, e.second - 1);

  // Enumerate weakly increasing cell assignments; a run of r coordinates in
  // one cell has ordered volume width^r / r!.
  std::vector<int> cell(static_cast<std::size_t>(k), 0);
  double total = 0.0;
  std::function<void(int, int)> rec = [&](int depth, int low) {
    if (depth == k) {
      double vol = 1.0;
      int run = 1;
      for (int c = 1; c <= k; ++c) {
        if (c < k && cell[static_cast<std::size_t>(c)] == cell[static_cast<std::size_t>(c - 1)]) {
          ++run;
          continue;
        }
        const double w = width[static_cast<std::size_t>(cell[static_cast<std::size_t>(c - 1)])];
        double fact = 1.0;
        for (int r = 2; r <= run; ++r) fact *= r;
        vol *= std::pow(w, run) / fact;
        run = 1;
      }
      double val = vol;
      for (int c = 0; c < k; ++c)
        val *= factors[static_cast<std::size_t>(c)](
            mid[static_cast<std::size_t>(cell[static_cast<std::size_t>(c)])]);
      if (val != 0.0) {
        for (const auto& e : edges) {
          const double kv =
              kappa(mid[static_cast<std::size_t>(cell[static_cast<std::size_t>(e.first)])],
                    mid[static_cast<std::size_t>(cell[static_cast<std::size_t>(e.second)])]);
          val *= with_edge_variance ? kv * (1.0 - kv) : kv;
        }
      }
      total += val;
      return;
    }
    for (int s = low; s < m; ++s) {
      cell[static_cast<std::size_t>(depth)] = s;
      rec(depth + 1, s);
    }
  };
  rec(0, 0);
  return total;
}

double limit_covariance_iid(const StatisticSpec& spec_i, const StatisticSpec& spec_j,
                            const Graphon& kappa) {
  spec_i.validate();
  spec_j.validate();
  if (spec_i.k() == 1 && spec_j.k() == 1) {
    const StepFunction1D phi_i = factor_or_constant(spec_i.phi, 0);
    const StepFunction1D phi_j = factor_or_constant(spec_j.phi, 0);
    const StepFunction1D psi_i = factor_or_constant(spec_i.psi, 0);
    const StepFunction1D psi_j = factor_or_constant(spec_j.psi, 0);
    const double cov = integral_product(psi_i, psi_j) - psi_i.integral() * psi_j.integral();
    return integral_product(phi_i, phi_j) * cov;
  }
  if (!(spec_i.pattern == spec_j.pattern)) return 0.0;
  const int k = spec_i.k();
  require_piecewise_constant(spec_i.phi, "limit covariance");
  require_piecewise_constant(spec_j.phi, "limit covariance");
  std::vector<StepFunction1D> phis;
  phis.reserve(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) phis.push_back(merged_factor({&spec_i.phi, &spec_j.phi}, c));
  const double simplex = simplex_block_integral(phis, PatternGraph::on_vertices(k), kappa, false);
  const double box = box_edge_variance_integral(spec_i.psi, spec_j.psi, spec_i.pattern, kappa);
  return simplex * box;
}

double limit_covariance_lattice(const StatisticSpec& spec_i, const StatisticSpec& spec_j,
                                const Graphon& kappa) {
  spec_i.validate();
  spec_j.validate();
  if (spec_i.k() == 1 || spec_j.k() == 1) return 0.0;
  if (!(spec_i.pattern == spec_j.pattern)) return 0.0;
  const int k = spec_i.k();
  for (const WeightFunction* w : {&spec_i.phi, &spec_j.phi, &spec_i.psi, &spec_j.psi})
    require_piecewise_constant(*w, "limit covariance");
  // Lattice labels equal the index coordinates, so psi folds into phi.
  std::vector<StepFunction1D> factors;
  factors.reserve(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c)
    factors.push_back(merged_factor({&spec_i.phi, &spec_j.phi, &spec_i.psi, &spec_j.psi}, c));
  return simplex_block_integral(factors, spec_i.pattern, kappa, true);
}

Eigen::MatrixXd sigma_limit_matrix(const std::vector<StatisticSpec>& specs,
                                   const Graphon& kappa, const LabelScheme& scheme) {
  if (scheme.kind() == LabelSchemeKind::kDiscrete)
    throw ConfigError("sigma_limit_matrix: limits are defined for iid-uniform and lattice labels");
  const int d = static_cast<int>(specs.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const auto& si = specs[static_cast<std::size_t>(i)];
      const auto& sj = specs[static_cast<std::size_t>(j)];
      double v = scheme.kind() == LabelSchemeKind::kLattice
                     ? limit_covariance_lattice(si, sj, kappa)
                     : limit_covariance_iid(si, sj, kappa);
      // Averages over the ordered index grid converge to the mean of the
      // integrand over the simplex, i.e. k! times the simplex integral.
      if (!(si.k() == 1 && sj.k() == 1) && si.pattern == sj.pattern && si.k() >= 2) {
        double fact = 1.0;
        for (int r = 2; r <= si.k(); ++r) fact *= r;
        v *= fact;
      }
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace gfluct
