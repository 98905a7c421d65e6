#include "gfluct/stein.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "gfluct/errors.hpp"
#include "gfluct/limit_covariance.hpp"
#include "gfluct/reduction.hpp"
#include "gfluct/rng.hpp"

namespace gfluct {

namespace {

std::vector<std::vector<int>> increasing_tuples(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(static_cast<std::size_t>(k));
  std::function<void(int, int)> rec = [&](int depth, int start) {
    if (depth == k) {
      out.push_back(a);
      return;
    }
    for (int v = start; v < n; ++v) {
      a[static_cast<std::size_t>(depth)] = v;
      rec(depth + 1, v + 1);
    }
  };
  rec(0, 0);
  return out;
}

int overlap(std::span<const int> a, const std::vector<int>& b) {
  int c = 0;
  for (int v : b)
    if (std::find(a.begin(), a.end(), v) != a.end()) ++c;
  return c;
}

std::string monomial_name(const std::vector<int>& alpha) {
  std::ostringstream os;
  bool any = false;
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    if (alpha[c] == 0) continue;
    if (any) os << "*";
    os << "w" << c;
    if (alpha[c] > 1) os << "^" << alpha[c];
    any = true;
  }
  return any ? os.str() : "1";
}

double monomial_value(const Eigen::VectorXd& w, const std::vector<int>& alpha) {
  double v = 1.0;
  for (std::size_t c = 0; c < alpha.size(); ++c)
    for (int r = 0; r < alpha[c]; ++r) v *= w[static_cast<Eigen::Index>(c)];
  return v;
}

std::vector<std::vector<int>> monomials_up_to(int d, int max_degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> alpha(static_cast<std::size_t>(d), 0);
  std::function<void(int, int)> rec = [&](int coord, int budget) {
    if (coord == d) {
      out.push_back(alpha);
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      alpha[static_cast<std::size_t>(coord)] = e;
      rec(coord + 1, budget - e);
    }
    alpha[static_cast<std::size_t>(coord)] = 0;
  };
  rec(0, max_degree);
  return out;
}

}  // namespace

std::vector<std::vector<int>> neighborhood(int k_i, std::span<const int> a, int k_j, int n) {
  const int threshold = std::min(2, k_i);
  std::vector<std::vector<int>> out;
  for (auto& b : increasing_tuples(n, k_j))
    if (overlap(a, b) >= threshold) out.push_back(std::move(b));
  return out;
}

double coupling_summand(const StatisticSpec& spec, std::span<const int> a,
                        const GraphSample& sample, const Graphon& kappa) {
  const int k = spec.k();
  const int n = sample.n;
  double phi = 1.0, psi = 1.0;
  for (int c = 0; c < k; ++c) {
    const int v = a[static_cast<std::size_t>(c)];
    phi *= spec.phi.factor_at(c, static_cast<double>(v + 1) / n);
    if (k >= 2) psi *= spec.psi.factor_at(c, sample.labels[v]);
  }
  if (k == 1) {
    const int v = a[0];
    psi = spec.psi(std::span<const double>(&sample.labels[v], 1)) -
          expected_psi(spec.psi, 0, sample.scheme, v, n);
    return phi * psi / std::sqrt(static_cast<double>(n));
  }
  return phi * psi * centred_indicator(spec.pattern, a, sample, kappa) /
         std::sqrt(binomial(n, k));
}

CouplingRealisation draw_coupling(const std::vector<StatisticSpec>& specs,
                                  const GraphSample& sample, const Graphon& kappa,
                                  std::uint64_t seed) {
  const int d = static_cast<int>(specs.size());
  const int n = sample.n;
  RngStream stream(derive_key(seed, StreamKind::kCoupling));
  CouplingRealisation out;
  out.index = static_cast<int>(stream.next_u64() % static_cast<std::uint64_t>(d));
  const auto& spec = specs[static_cast<std::size_t>(out.index)];
  const auto tuples = increasing_tuples(n, spec.k());
  out.tuple = tuples[static_cast<std::size_t>(stream.next_u64() % tuples.size())];

  out.w = statistic_vector(specs, sample, kappa);
  out.w_prime = out.w;
  for (int j = 0; j < d; ++j) {
    const auto& spec_j = specs[static_cast<std::size_t>(j)];
    for (const auto& b : neighborhood(spec.k(), out.tuple, spec_j.k(), n))
      out.w_prime[j] -= coupling_summand(spec_j, b, sample, kappa);
  }
  out.direction = Eigen::VectorXd::Zero(d);
  out.direction[out.index] = -static_cast<double>(d) * binomial(n, spec.k()) *
                             coupling_summand(spec, out.tuple, sample, kappa);
  return out;
}

SteinReport verify_stein_identity_exact(const std::vector<StatisticSpec>& specs,
                                        const Graphon& kappa, int n,
                                        const LabelScheme& scheme, int max_degree) {
  const int d = static_cast<int>(specs.size());
  const int pairs = n * (n - 1) / 2;
  if (pairs > 20)
    throw FeasibilityError("stein check: needs n(n-1)/2 <= 20 for total enumeration");
  if (scheme.kind() == LabelSchemeKind::kIidUniform)
    throw ConfigError("stein check: exact enumeration needs lattice or discrete labels");
  for (const auto& s : specs) s.validate();

  // Tuple lists and neighbourhood index tables, independent of labels/edges.
  std::vector<std::vector<std::vector<int>>> tuples(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    tuples[static_cast<std::size_t>(i)] =
        increasing_tuples(n, specs[static_cast<std::size_t>(i)].k());
  // nbr[i][a][j] = indices into tuples[j] overlapping tuple a of spec i.
  std::vector<std::vector<std::vector<std::vector<std::size_t>>>> nbr(
      static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const int ki = specs[static_cast<std::size_t>(i)].k();
    nbr[static_cast<std::size_t>(i)].resize(tuples[static_cast<std::size_t>(i)].size());
    for (std::size_t ai = 0; ai < tuples[static_cast<std::size_t>(i)].size(); ++ai) {
      auto& per_j = nbr[static_cast<std::size_t>(i)][ai];
      per_j.resize(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) {
        const int threshold = std::min(2, ki);
        for (std::size_t bi = 0; bi < tuples[static_cast<std::size_t>(j)].size(); ++bi)
          if (overlap(tuples[static_cast<std::size_t>(i)][ai],
                      tuples[static_cast<std::size_t>(j)][bi]) >= threshold)
            per_j[static_cast<std::size_t>(j)].push_back(bi);
      }
    }
  }

  const auto alphas = monomials_up_to(d, max_degree);
  std::vector<SteinCheckRow> rows;
  for (int j = 0; j < d; ++j)
    for (const auto& alpha : alphas) {
      SteinCheckRow r;
      r.coordinate = j;
      r.monomial = monomial_name(alpha);
      rows.push_back(std::move(r));
    }
  Eigen::MatrixXd gd = Eigen::MatrixXd::Zero(d, d);

  // Label assignments: lattice is a single deterministic vector, discrete
  // atoms enumerate with their product probabilities.
  std::vector<std::pair<Eigen::VectorXd, double>> label_sets;
  if (scheme.kind() == LabelSchemeKind::kLattice) {
    label_sets.emplace_back(sample_labels(scheme, n, 0), 1.0);
  } else {
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
      Eigen::VectorXd u(n);
      double p = 1.0;
      for (int v = 0; v < n; ++v) {
        const auto& dist = scheme.distribution(v);
        u[v] = dist.atoms[idx[static_cast<std::size_t>(v)]];
        p *= dist.probs[idx[static_cast<std::size_t>(v)]];
      }
      if (p > 0.0) label_sets.emplace_back(std::move(u), p);
      int pos = n - 1;
      while (pos >= 0) {
        const auto& dist = scheme.distribution(pos);
        if (idx[static_cast<std::size_t>(pos)] + 1 == dist.atoms.size()) {
          idx[static_cast<std::size_t>(pos)] = 0;
          --pos;
        } else
          break;
      }
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      if (label_sets.size() > 2000000)
        throw FeasibilityError("stein check: too many label assignments");
    }
  }

  GraphSample g;
  g.n = n;
  g.scheme = scheme;
  g.model = EdgeModel::bernoulli();
  g.edges.resize(pairs);

  for (const auto& [labels, label_prob] : label_sets) {
    g.labels = labels;
    std::vector<double> edge_p(static_cast<std::size_t>(pairs));
    {
      int idx = 0;
      for (int v = 0; v < n; ++v)
        for (int w = v + 1; w < n; ++w)
          edge_p[static_cast<std::size_t>(idx++)] = kappa(labels[v], labels[w]);
    }
    for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
      double prob = label_prob;
      for (int b = 0; b < pairs; ++b) {
        const bool on = mask & (1u << b);
        g.edges[b] = on ? 1.0 : 0.0;
        prob *= on ? edge_p[static_cast<std::size_t>(b)] : 1.0 - edge_p[static_cast<std::size_t>(b)];
      }
      if (prob == 0.0) continue;

      // All summands and the statistic vector for this configuration.
      std::vector<std::vector<double>> x(static_cast<std::size_t>(d));
      Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < d; ++i) {
        auto& xi = x[static_cast<std::size_t>(i)];
        xi.resize(tuples[static_cast<std::size_t>(i)].size());
        for (std::size_t ai = 0; ai < xi.size(); ++ai) {
          xi[ai] = coupling_summand(specs[static_cast<std::size_t>(i)],
                                    tuples[static_cast<std::size_t>(i)][ai], g, kappa);
          w[i] += xi[ai];
        }
      }

      std::size_t row = 0;
      for (int j = 0; j < d; ++j) {
        // W' for every tuple of coordinate j, then all monomials.
        std::vector<Eigen::VectorXd> wp(tuples[static_cast<std::size_t>(j)].size());
        for (std::size_t ai = 0; ai < wp.size(); ++ai) {
          wp[ai] = w;
          for (int c = 0; c < d; ++c)
            for (std::size_t bi : nbr[static_cast<std::size_t>(j)][ai][static_cast<std::size_t>(c)])
              wp[ai][c] -= x[static_cast<std::size_t>(c)][bi];
        }
        for (const auto& alpha : alphas) {
          double lhs = 0.0;
          for (std::size_t ai = 0; ai < wp.size(); ++ai)
            lhs -= x[static_cast<std::size_t>(j)][ai] *
                   (monomial_value(wp[ai], alpha) - monomial_value(w, alpha));
          rows[row].lhs += prob * lhs;
          rows[row].rhs += prob * w[j] * monomial_value(w, alpha);
          ++row;
        }
      }

      for (int i = 0; i < d; ++i)
        for (std::size_t ai = 0; ai < tuples[static_cast<std::size_t>(i)].size(); ++ai)
          for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t bi : nbr[static_cast<std::size_t>(i)][ai][static_cast<std::size_t>(j)])
              s += x[static_cast<std::size_t>(j)][bi];
            gd(i, j) += prob * x[static_cast<std::size_t>(i)][ai] * s;
          }
    }
  }

  SteinReport report;
  report.n = n;
  report.d = d;
  report.gd = gd;
  report.sigma = covariance_matrix(specs, scheme, kappa, n);
  report.max_gd_gap = (gd - report.sigma).cwiseAbs().maxCoeff();
  for (auto& r : rows) r.residual = std::abs(r.lhs - r.rhs);
  report.rows = std::move(rows);
  report.max_residual = 0.0;
  for (const auto& r : report.rows)
    report.max_residual = std::max(report.max_residual, r.residual);
  return report;
}

Chaos4Result fourth_moment_experiment(int n, long replications, const WeightFunction& phi,
                                      std::uint64_t seed) {
  if (n < 3) throw ConfigError("fourth moment experiment: n must be at least 3");
  if (phi.arity() != 0 && phi.arity() != 3)
    throw ConfigError("fourth moment experiment: phi lives on ordered triples");
  if (!phi.piecewise_constant())
    throw ConfigError("fourth moment experiment: phi must be piecewise constant");

  // Normalisation: the squared weight must integrate to 1 over the simplex.
  {
    std::vector<StepFunction1D> sq;
    for (int c = 0; c < 3; ++c) {
      StepFunction1D f = phi.is_constant()
                             ? StepFunction1D::constant(c == 0 ? phi.constant_value() : 1.0)
                             : phi.factors()[static_cast<std::size_t>(c)];
      for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] *= f.values[i];
      sq.push_back(std::move(f));
    }
    const double norm =
        simplex_block_integral(sq, PatternGraph::on_vertices(3), Graphon::constant(0.5), false);
    if (std::abs(norm - 1.0) > 1e-9)
      throw ConfigError("fourth moment experiment: int over the simplex of phi^2 must be 1");
  }

  const double v = 1.0 / (static_cast<double>(n) * n);  // Var X_ij
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  // Exact second moment and the paired-terms fourth-moment target.
  double s2 = 0.0, s4 = 0.0;
  std::vector<double> t(3);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int kk = j + 1; kk < n; ++kk) {
        t[0] = (i + 1.0) / n;
        t[1] = (j + 1.0) / n;
        t[2] = (kk + 1.0) / n;
        const double c = sqrt_n * phi(t);
        s2 += c * c;
        s4 += c * c * c * c;
      }
  const double exact2 = v * v * s2;
  const double target4 = 3.0 * s4 * v * v * v * v + 3.0 * (s2 * s2 - s4) * v * v * v * v;

  // Full fourth moment of the quadratic form F = X^t M X: the paired-terms
  // formula plus the closed-4-walk cumulant 48 v^4 tr(M^4). M couples the two
  // edges of every ordered wedge with weight c_t / 2.
  double exact4 = std::numeric_limits<double>::quiet_NaN();
  const long n_edges = static_cast<long>(n) * (n - 1) / 2;
  if (static_cast<double>(n_edges) * n * n <= 5e9) {
    auto edge_index = [n](int a, int b) {
      return static_cast<std::size_t>(GraphSample::pair_index(a, b, n));
    };
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(
        static_cast<std::size_t>(n_edges));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int kk = j + 1; kk < n; ++kk) {
          t[0] = (i + 1.0) / n;
          t[1] = (j + 1.0) / n;
          t[2] = (kk + 1.0) / n;
          const double half_c = 0.5 * sqrt_n * phi(t);
          if (half_c == 0.0) continue;
          const std::size_t e = edge_index(i, j), f = edge_index(j, kk);
          adj[e].emplace_back(f, half_c);
          adj[f].emplace_back(e, half_c);
        }
    // tr(M^4) = sum over edges of the squared 2-hop row; rows are expanded
    // into a dense scratch vector one at a time.
    double tr4 = 0.0;
    std::vector<double> row(static_cast<std::size_t>(n_edges), 0.0);
    std::vector<std::size_t> touched;
    for (std::size_t e = 0; e < adj.size(); ++e) {
      touched.clear();
      for (const auto& [f, mef] : adj[e])
        for (const auto& [g, mfg] : adj[f]) {
          if (row[g] == 0.0) touched.push_back(g);
          row[g] += mef * mfg;
        }
      for (std::size_t g : touched) {
        tr4 += row[g] * row[g];
        row[g] = 0.0;
      }
    }
    exact4 = target4 + 48.0 * v * v * v * v * tr4;
  }

  // Per-replication weight rows: w2 on the centre, w1/w3 on the ends.
  Eigen::VectorXd w1(n), w2(n), w3(n);
  for (int i = 0; i < n; ++i) {
    const double ti = (i + 1.0) / n;
    w1[i] = phi.factor_at(0, ti);
    w2[i] = phi.factor_at(1, ti);
    w3[i] = phi.factor_at(2, ti);
  }

  std::vector<double> f(static_cast<std::size_t>(replications));
  const std::size_t n_chunks = static_cast<std::size_t>(replications);
  parallel_for_chunks(n_chunks, [&](std::size_t r) {
    RngStream stream(derive_key(seed, StreamKind::kChaos, static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    const double sd = 1.0 / static_cast<double>(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double z = sd * stream.next_gaussian();
        x(i, j) = z;
        x(j, i) = z;
      }
    // Wedge sum via the centre vertex, restricted to i < j < k.
    double total = 0.0;
    for (int j = 1; j + 1 < n; ++j) {
      const double left = (x.row(j).head(j).transpose().array() * w1.head(j).array()).sum();
      const int len = n - j - 1;
      const double right =
          (x.row(j).segment(j + 1, len).transpose().array() * w3.segment(j + 1, len).array()).sum();
      total += w2[j] * left * right;
    }
    f[r] = sqrt_n * total;
  });

  // Moment accumulation in fixed replication order.
  std::vector<double> f2(f.size()), f4(f.size()), f8(f.size());
  for (std::size_t r = 0; r < f.size(); ++r) {
    f2[r] = f[r] * f[r];
    f4[r] = f2[r] * f2[r];
    f8[r] = f4[r] * f4[r];
  }
  const double m2 = pairwise_sum(f2) / static_cast<double>(replications);
  const double m4 = pairwise_sum(f4) / static_cast<double>(replications);
  const double m8 = pairwise_sum(f8) / static_cast<double>(replications);

  Chaos4Result out;
  out.n = n;
  out.replications = replications;
  out.estimate2 = m2;
  out.se2 = std::sqrt(std::max(0.0, m4 - m2 * m2) / static_cast<double>(replications));
  out.estimate4 = m4;
  out.se4 = std::sqrt(std::max(0.0, m8 - m4 * m4) / static_cast<double>(replications));
  out.exact2 = exact2;
  out.target4 = target4;
  out.exact4 = exact4;
  return out;
}

}  // namespace gfluct
