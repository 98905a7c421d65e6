#include "gfluct/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "gfluct/errors.hpp"
#include "gfluct/reduction.hpp"

namespace gfluct {

namespace {

constexpr double kEnumerationGuard = 1e9;

StepFunction1D weight_factor(const WeightFunction& w, int c) {
  if (w.is_constant()) return StepFunction1D::constant(c == 0 ? w.constant_value() : 1.0);
  return w.factors()[static_cast<std::size_t>(c)];
}

double edge_variance(double kappa_value) { return kappa_value * (1.0 - kappa_value); }

std::vector<std::pair<int, int>> edge_positions(const PatternGraph& F) {
  std::vector<std::pair<int, int>> out;
  out.reserve(F.edges().size());
  for (const auto& e : F.edges()) out.emplace_back(e.first - 1, e.second - 1);
  return out;
}

// Sum over strictly increasing k-tuples of prod_c w[c][a_c] * prod M(a_v,a_w)
// over the listed position pairs. M may be null only when there are no edges.
class PatternSum {
 public:
  PatternSum(const std::vector<Eigen::VectorXd>& w,
             const std::vector<std::pair<int, int>>& edges, const Eigen::MatrixXd* M)
      : w_(w), edges_(edges), m_(M), k_(static_cast<int>(w.size())),
        n_(static_cast<int>(w.front().size())) {}

  double run() const {
    switch (k_) {
      case 1: return w_[0].sum();
      case 2: return edges_.empty() ? increasing_product_sum() : sum_k2();
      case 3: return sum_k3();
      default: return edges_.empty() ? increasing_product_sum() : generic();
    }
  }

 private:
  // DP for edgeless patterns: P_c(i) = w_c(i) * sum_{j<i} P_{c-1}(j).
  double increasing_product_sum() const {
    Eigen::VectorXd prev = w_[0];
    for (int c = 1; c < k_; ++c) {
      Eigen::VectorXd cur(n_);
      double run = 0.0;
      for (int i = 0; i < n_; ++i) {
        cur[i] = w_[static_cast<std::size_t>(c)][i] * run;
        run += prev[i];
      }
      prev = std::move(cur);
    }
    return prev.sum();
  }

  double sum_k2() const {
    double s = 0.0;
    for (int i = 0; i + 1 < n_; ++i) {
      const int len = n_ - i - 1;
      const double dot = (m_->row(i).segment(i + 1, len).transpose().array() *
                          w_[1].segment(i + 1, len).array())
                             .sum();
      s += w_[0][i] * dot;
    }
    return s;
  }

  double sum_k3() const {
    const auto& e = edges_;
    auto has = [&e](int a, int b) {
      return std::find(e.begin(), e.end(), std::make_pair(a, b)) != e.end();
    };
    if (e.empty()) return increasing_product_sum();
    if (e.size() == 1) return sum_k3_single_edge(e[0]);
    if (e.size() == 2) {
      if (has(0, 1) && has(0, 2)) return sum_k3_star(0);
      if (has(0, 1) && has(1, 2)) return sum_k3_star(1);
      return sum_k3_star(2);
    }
    return sum_k3_triangle();
  }

  double sum_k3_star(int center) const {
    double s = 0.0;
    if (center == 1) {
      for (int j = 1; j + 1 < n_; ++j) {
        const double left = (m_->row(j).head(j).transpose().array() * w_[0].head(j).array()).sum();
        const int len = n_ - j - 1;
        const double right = (m_->row(j).segment(j + 1, len).transpose().array() *
                              w_[2].segment(j + 1, len).array())
                                 .sum();
        s += w_[1][j] * left * right;
      }
      return s;
    }
    if (center == 0) {
      for (int i = 0; i + 2 < n_; ++i) {
        double prefix = 0.0, inner = 0.0;
        for (int m = i + 1; m < n_; ++m) {
          const double mv = (*m_)(i, m);
          inner += w_[2][m] * mv * prefix;
          prefix += w_[1][m] * mv;
        }
        s += w_[0][i] * inner;
      }
      return s;
    }
    for (int kk = 2; kk < n_; ++kk) {
      double prefix = 0.0, inner = 0.0;
      for (int m = 0; m < kk; ++m) {
        const double mv = (*m_)(m, kk);
        inner += w_[1][m] * mv * prefix;
        prefix += w_[0][m] * mv;
      }
      s += w_[2][kk] * inner;
    }
    return s;
  }

  double sum_k3_single_edge(std::pair<int, int> edge) const {
    // Suffix/prefix sums over the free position.
    double s = 0.0;
    if (edge == std::make_pair(0, 1)) {
      Eigen::VectorXd suffix = Eigen::VectorXd::Zero(n_ + 1);
      for (int m = n_ - 1; m >= 0; --m) suffix[m] = suffix[m + 1] + w_[2][m];
      for (int i = 0; i + 1 < n_; ++i)
        for (int j = i + 1; j + 1 < n_; ++j)
          s += w_[0][i] * w_[1][j] * (*m_)(i, j) * suffix[j + 1];
      return s;
    }
    if (edge == std::make_pair(1, 2)) {
      Eigen::VectorXd prefix = Eigen::VectorXd::Zero(n_ + 1);
      for (int m = 0; m < n_; ++m) prefix[m + 1] = prefix[m] + w_[0][m];
      for (int j = 1; j + 1 < n_; ++j)
        for (int kk = j + 1; kk < n_; ++kk)
          s += w_[1][j] * w_[2][kk] * (*m_)(j, kk) * prefix[j];
      return s;
    }
    // edge (0,2): middle position free
    Eigen::VectorXd prefix = Eigen::VectorXd::Zero(n_ + 1);
    for (int m = 0; m < n_; ++m) prefix[m + 1] = prefix[m] + w_[1][m];
    for (int i = 0; i + 2 < n_; ++i)
      for (int kk = i + 2; kk < n_; ++kk)
        s += w_[0][i] * w_[2][kk] * (*m_)(i, kk) * (prefix[kk] - prefix[i + 1]);
    return s;
  }

  double sum_k3_triangle() const {
    if (w_[0] == w_[1] && w_[1] == w_[2]) {
      // Equal position weights: fold them into the matrix and read the sum
      // off the cubed trace (the zero diagonal kills coincident indices).
      const Eigen::MatrixXd m = w_[0].asDiagonal() * (*m_);
      return ((m * m).array() * m.transpose().array()).sum() / 6.0;
    }
    double s = 0.0;
    for (int i = 0; i + 2 < n_; ++i) {
      for (int j = i + 1; j + 1 < n_; ++j) {
        const int len = n_ - j - 1;
        const double inner = (m_->row(i).segment(j + 1, len).transpose().array() *
                              m_->row(j).segment(j + 1, len).transpose().array() *
                              w_[2].segment(j + 1, len).array())
                                 .sum();
        s += w_[0][i] * w_[1][j] * (*m_)(i, j) * inner;
      }
    }
    return s;
  }

  // Arbitrary patterns: depth-first over increasing tuples, split across
  // leading indices; chunk results are combined pairwise in index order.
  double generic() const {
    std::vector<double> chunk(static_cast<std::size_t>(n_), 0.0);
    parallel_for_chunks(static_cast<std::size_t>(n_), [&](std::size_t i0) {
      std::vector<int> a(static_cast<std::size_t>(k_));
      a[0] = static_cast<int>(i0);
      chunk[i0] = recurse(a, 1, w_[0][static_cast<Eigen::Index>(i0)]);
    });
    return pairwise_sum(chunk);
  }

  double recurse(std::vector<int>& a, int depth, double partial) const {
    if (partial == 0.0) return 0.0;
    double s = 0.0;
    for (int v = a[static_cast<std::size_t>(depth - 1)] + 1; v <= n_ - (k_ - depth); ++v) {
      a[static_cast<std::size_t>(depth)] = v;
      double p = partial * w_[static_cast<std::size_t>(depth)][v];
      for (const auto& ed : edges_)
        if (ed.second == depth) p *= (*m_)(a[static_cast<std::size_t>(ed.first)], v);
      if (depth == k_ - 1) s += p;
      else s += recurse(a, depth + 1, p);
    }
    return s;
  }

  const std::vector<Eigen::VectorXd>& w_;
  const std::vector<std::pair<int, int>> edges_;
  const Eigen::MatrixXd* m_;
  const int k_;
  const int n_;
};

}  // namespace

double pattern_weighted_sum(const std::vector<Eigen::VectorXd>& w,
                            const std::vector<std::pair<int, int>>& edges,
                            const Eigen::MatrixXd* M) {
  return PatternSum(w, edges, M).run();
}

namespace {

std::vector<Eigen::VectorXd> position_weights(const StatisticSpec& spec,
                                              const GraphSample& sample) {
  const int k = spec.k();
  const int n = sample.n;
  std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(k), Eigen::VectorXd::Ones(n));
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i + 1) / static_cast<double>(n);
      w[static_cast<std::size_t>(c)][i] =
          spec.phi.factor_at(c, t) * spec.psi.factor_at(c, sample.labels[i]);
    }
  }
  return w;
}

}  // namespace

void StatisticSpec::validate() const {
  const int kk = pattern.vertex_count();
  if (kk < 1) throw ConfigError("statistic spec: pattern must have at least one vertex");
  if (!pattern.vertices().empty() &&
      (pattern.vertices().front() != 1 || pattern.vertices().back() != kk))
    throw ConfigError("statistic spec: pattern must live on the vertex set [k]");
  if (!pattern.is_connected())
    throw ConfigError("statistic spec: pattern must be connected");
  if (kk == 1 && pattern.edge_count() != 0)
    throw ConfigError("statistic spec: single-vertex pattern cannot have edges");
  if (phi.arity() != 0 && phi.arity() != kk)
    throw ConfigError("statistic spec: phi arity mismatch");
  if (psi.arity() != 0 && psi.arity() != kk)
    throw ConfigError("statistic spec: psi arity mismatch");
}

double falling_factorial(int n, int k) {
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= static_cast<double>(n - i);
  return p;
}

double binomial(int n, int k) {
  double p = 1.0;
  for (int i = 0; i < k; ++i)
    p *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  return p;
}

std::int64_t hom_count(const PatternGraph& F, const GraphSample& sample) {
  if (!sample.is_binary())
    throw ConfigError("hom_count: sample must have 0/1 edges");
  const int k = F.vertex_count();
  const int n = sample.n;
  if (std::pow(static_cast<double>(n), k) > kEnumerationGuard)
    throw FeasibilityError("hom_count: n^k exceeds the enumeration guard");
  const auto edges = edge_positions(canonical_relabel(F));
  std::vector<int> a(static_cast<std::size_t>(k), 0);
  std::int64_t count = 0;
  // Depth-first over all maps [k] -> [n] with early pruning.
  std::function<void(int)> rec = [&](int depth) {
    if (depth == k) {
      ++count;
      return;
    }
    for (int v = 0; v < n; ++v) {
      bool ok = true;
      for (const auto& e : edges) {
        if (e.second != depth) continue;
        const int u = a[static_cast<std::size_t>(e.first)];
        if (u == v || sample.edge(u, v) != 1.0) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      a[static_cast<std::size_t>(depth)] = v;
      rec(depth + 1);
    }
  };
  rec(0);
  return count;
}

double injective_density(const PatternGraph& F, const GraphSample& sample) {
  if (!sample.is_binary())
    throw ConfigError("injective_density: sample must have 0/1 edges");
  const int k = F.vertex_count();
  const int n = sample.n;
  if (n < k) throw ConfigError("injective_density: n < k");
  double perms = 1.0;
  for (int i = 2; i <= k; ++i) perms *= i;
  if (binomial(n, k) * perms > kEnumerationGuard)
    throw FeasibilityError("injective_density: (n)_k exceeds the enumeration guard");
  const auto edges = edge_positions(canonical_relabel(F));

  std::vector<int> base(static_cast<std::size_t>(k));
  std::int64_t count = 0;
  std::function<void(int, int)> rec = [&](int depth, int start) {
    if (depth == k) {
      std::vector<int> perm(base);
      std::sort(perm.begin(), perm.end());
      do {
        bool ok = true;
        for (const auto& e : edges) {
          if (sample.edge(perm[static_cast<std::size_t>(e.first)],
                          perm[static_cast<std::size_t>(e.second)]) != 1.0) {
            ok = false;
            break;
          }
        }
        if (ok) ++count;
      } while (std::next_permutation(perm.begin(), perm.end()));
      return;
    }
    for (int v = start; v < n; ++v) {
      base[static_cast<std::size_t>(depth)] = v;
      rec(depth + 1, v + 1);
    }
  };
  rec(0, 0);
  return static_cast<double>(count) / falling_factorial(n, k);
}

double centred_indicator(const PatternGraph& F, std::span<const int> a,
                         const GraphSample& sample, const Graphon& kappa) {
  const int k = F.vertex_count();
  if (static_cast<int>(a.size()) != k)
    throw ConfigError("centred_indicator: tuple size mismatch");
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    if (a[i] >= a[i + 1]) throw ConfigError("centred_indicator: tuple must be strictly increasing");
  if (!a.empty() && (a.front() < 0 || a.back() >= sample.n))
    throw ConfigError("centred_indicator: tuple outside [0,n)");
  if (k <= 1) return 1.0;
  double p = 1.0;
  for (const auto& e : edge_positions(F)) {
    const int v = a[static_cast<std::size_t>(e.first)];
    const int w = a[static_cast<std::size_t>(e.second)];
    p *= sample.edge(v, w) - kappa(sample.labels[v], sample.labels[w]);
  }
  return p;
}

Eigen::MatrixXd centred_edge_matrix(const GraphSample& sample, const Graphon& kappa) {
  const int n = sample.n;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    for (int w = v + 1; w < n; ++w) {
      const double c = sample.edge(v, w) - kappa(sample.labels[v], sample.labels[w]);
      x(v, w) = c;
      x(w, v) = c;
    }
  }
  return x;
}

Eigen::VectorXd statistic_vector(const std::vector<StatisticSpec>& specs,
                                 const GraphSample& sample, const Graphon& kappa) {
  const int n = sample.n;
  Eigen::MatrixXd x;
  bool have_x = false;
  Eigen::VectorXd out(static_cast<Eigen::Index>(specs.size()));
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& spec = specs[s];
    spec.validate();
    const int k = spec.k();
    if (n < k) throw ConfigError("statistic_vector: n < k");
    if (binomial(n, k) > kEnumerationGuard)
      throw FeasibilityError("statistic_vector: binom(n,k) exceeds the enumeration guard");
    if (k == 1) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) / static_cast<double>(n);
        const double centred =
            spec.psi(std::span<const double>(&sample.labels[i], 1)) -
            expected_psi(spec.psi, 0, sample.scheme, i, n);
        acc += spec.phi(std::span<const double>(&t, 1)) * centred;
      }
      out[static_cast<Eigen::Index>(s)] = acc / std::sqrt(static_cast<double>(n));
      continue;
    }
    if (!have_x) {
      x = centred_edge_matrix(sample, kappa);
      have_x = true;
    }
    const auto w = position_weights(spec, sample);
    const auto edges = edge_positions(spec.pattern);
    const double sum = PatternSum(w, edges, &x).run();
    out[static_cast<Eigen::Index>(s)] = sum / std::sqrt(binomial(n, k));
  }
  return out;
}

double expected_psi(const WeightFunction& psi, int coordinate, const LabelScheme& scheme,
                    int vertex, int n) {
  switch (scheme.kind()) {
    case LabelSchemeKind::kLattice: {
      const double u = static_cast<double>(vertex + 1) / static_cast<double>(n);
      return psi.factor_at(coordinate, u);
    }
    case LabelSchemeKind::kIidUniform:
      return weight_factor(psi, coordinate).integral();
    case LabelSchemeKind::kDiscrete: {
      const auto& d = scheme.distribution(vertex);
      double e = 0.0;
      for (Eigen::Index i = 0; i < d.atoms.size(); ++i)
        e += d.probs[i] * psi.factor_at(coordinate, d.atoms[i]);
      return e;
    }
  }
  return 0.0;
}

double box_edge_variance_integral(const WeightFunction& psi_i, const WeightFunction& psi_j,
                                  const PatternGraph& F, const Graphon& kappa) {
  const int k = F.vertex_count();
  const auto edges = edge_positions(F);

  // Per coordinate: merge kappa cells with both weight factors' breakpoints;
  // on each merged cell the integrand factor is a product of two linears.
  struct Cell {
    int kappa_cell;
    double weight_integral;
  };
  std::vector<std::vector<Cell>> coords(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    const StepFunction1D fi = weight_factor(psi_i, c);
    const StepFunction1D fj = weight_factor(psi_j, c);
    std::vector<double> pts(kappa.boundaries().data(),
                            kappa.boundaries().data() + kappa.boundaries().size());
    pts.insert(pts.end(), fi.boundaries.data(), fi.boundaries.data() + fi.boundaries.size());
    pts.insert(pts.end(), fj.boundaries.data(), fj.boundaries.data() + fj.boundaries.size());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
      const double a = pts[s], b = pts[s + 1], mid = 0.5 * (a + b);
      const int ci = fi.cell_of(mid), cj = fj.cell_of(mid);
      auto fiv = [&](double t) { return fi.values[ci] + fi.slope(ci) * t; };
      auto fjv = [&](double t) { return fj.values[cj] + fj.slope(cj) * t; };
      const double wint = (b - a) / 6.0 *
                          (fiv(a) * fjv(a) + 4.0 * fiv(mid) * fjv(mid) + fiv(b) * fjv(b));
      coords[static_cast<std::size_t>(c)].push_back({kappa.cell_of(mid), wint});
    }
  }

  double total_cells = 1.0;
  for (const auto& cc : coords) total_cells *= static_cast<double>(cc.size());
  if (total_cells > 2e8)
    throw FeasibilityError("box integral: too many cell combinations");

  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  double sum = 0.0;
  for (;;) {
    double w = 1.0;
    for (int c = 0; c < k; ++c) w *= coords[static_cast<std::size_t>(c)][idx[static_cast<std::size_t>(c)]].weight_integral;
    if (w != 0.0) {
      for (const auto& e : edges) {
        const int cv = coords[static_cast<std::size_t>(e.first)][idx[static_cast<std::size_t>(e.first)]].kappa_cell;
        const int cw = coords[static_cast<std::size_t>(e.second)][idx[static_cast<std::size_t>(e.second)]].kappa_cell;
        w *= edge_variance(kappa.cell_value(cv, cw));
      }
      sum += w;
    }
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] + 1 == coords[static_cast<std::size_t>(pos)].size()) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
  }
  return sum;
}

Eigen::MatrixXd covariance_matrix(const std::vector<StatisticSpec>& specs,
                                  const LabelScheme& scheme, const Graphon& kappa, int n,
                                  const EdgeModel& model) {
  if (model.kind != EdgeModelKind::kBernoulli)
    throw ConfigError(
        "covariance_matrix: exact covariances carry the Bernoulli edge variance "
        "kappa(1-kappa); only the Bernoulli model is supported");
  if (!kappa.nondegenerate())
    throw ConfigError("covariance_matrix: kernel is identically 0 or 1");
  const int d = static_cast<int>(specs.size());
  for (const auto& s : specs) s.validate();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);

  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const auto& si = specs[static_cast<std::size_t>(i)];
      const auto& sj = specs[static_cast<std::size_t>(j)];
      double v = 0.0;
      if (si.k() == 1 && sj.k() == 1) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) {
          const double t = static_cast<double>(a + 1) / static_cast<double>(n);
          double cov = 0.0;
          switch (scheme.kind()) {
            case LabelSchemeKind::kLattice:
              cov = 0.0;
              break;
            case LabelSchemeKind::kIidUniform: {
              const StepFunction1D fi = weight_factor(si.psi, 0);
              const StepFunction1D fj = weight_factor(sj.psi, 0);
              cov = integral_product(fi, fj) - fi.integral() * fj.integral();
              break;
            }
            case LabelSchemeKind::kDiscrete: {
              const auto& dd = scheme.distribution(a);
              double eij = 0.0, ei = 0.0, ej = 0.0;
              for (Eigen::Index q = 0; q < dd.atoms.size(); ++q) {
                const double fi = si.psi.factor_at(0, dd.atoms[q]);
                const double fj = sj.psi.factor_at(0, dd.atoms[q]);
                eij += dd.probs[q] * fi * fj;
                ei += dd.probs[q] * fi;
                ej += dd.probs[q] * fj;
              }
              cov = eij - ei * ej;
              break;
            }
          }
          acc += si.phi.factor_at(0, t) * sj.phi.factor_at(0, t) * cov;
        }
        v = acc / static_cast<double>(n);
      } else if (si.pattern == sj.pattern && si.k() >= 2) {
        const int k = si.k();
        if (n < k) throw ConfigError("covariance_matrix: n < k");
        if (binomial(n, k) > kEnumerationGuard)
          throw FeasibilityError("covariance_matrix: binom(n,k) exceeds the enumeration guard");
        const auto edges = edge_positions(si.pattern);
        if (scheme.kind() == LabelSchemeKind::kLattice) {
          // Deterministic labels: evaluate pointwise at a/n.
          Eigen::MatrixXd ev(n, n);
          ev.setZero();
          for (int v1 = 0; v1 < n; ++v1)
            for (int v2 = v1 + 1; v2 < n; ++v2) {
              const double t1 = static_cast<double>(v1 + 1) / n;
              const double t2 = static_cast<double>(v2 + 1) / n;
              const double g = edge_variance(kappa(t1, t2));
              ev(v1, v2) = g;
              ev(v2, v1) = g;
            }
          std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(k), Eigen::VectorXd::Ones(n));
          for (int c = 0; c < k; ++c)
            for (int a = 0; a < n; ++a) {
              const double t = static_cast<double>(a + 1) / static_cast<double>(n);
              w[static_cast<std::size_t>(c)][a] = si.phi.factor_at(c, t) * sj.phi.factor_at(c, t) *
                                                  si.psi.factor_at(c, t) * sj.psi.factor_at(c, t);
            }
          v = PatternSum(w, edges, &ev).run() / binomial(n, k);
        } else if (scheme.kind() == LabelSchemeKind::kIidUniform ||
                   (scheme.kind() == LabelSchemeKind::kDiscrete && scheme.shared_distribution())) {
          // Exchangeable labels: the label expectation is tuple-independent.
          double label_part = 0.0;
          if (scheme.kind() == LabelSchemeKind::kIidUniform) {
            label_part = box_edge_variance_integral(si.psi, sj.psi, si.pattern, kappa);
          } else {
            const auto& dd = scheme.distribution(0);
            const Eigen::Index m = dd.atoms.size();
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(k), 0);
            std::vector<double> u(static_cast<std::size_t>(k), 0.0);
            for (;;) {
              double wgt = 1.0;
              for (int c = 0; c < k; ++c) {
                wgt *= dd.probs[idx[static_cast<std::size_t>(c)]];
                u[static_cast<std::size_t>(c)] = dd.atoms[idx[static_cast<std::size_t>(c)]];
              }
              double val = si.psi(u) * sj.psi(u);
              for (const auto& e : edges)
                val *= edge_variance(kappa(u[static_cast<std::size_t>(e.first)],
                                           u[static_cast<std::size_t>(e.second)]));
              label_part += wgt * val;
              int pos = k - 1;
              while (pos >= 0 && idx[static_cast<std::size_t>(pos)] + 1 == m) {
                idx[static_cast<std::size_t>(pos)] = 0;
                --pos;
              }
              if (pos < 0) break;
              ++idx[static_cast<std::size_t>(pos)];
            }
          }
          std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(k), Eigen::VectorXd::Ones(n));
          for (int c = 0; c < k; ++c)
            for (int a = 0; a < n; ++a) {
              const double t = static_cast<double>(a + 1) / static_cast<double>(n);
              w[static_cast<std::size_t>(c)][a] = si.phi.factor_at(c, t) * sj.phi.factor_at(c, t);
            }
          const double grid = PatternSum(w, {}, nullptr).run() / binomial(n, k);
          v = grid * label_part;
        } else {
          // Per-vertex discrete labels: expectation is computed per tuple.
          const auto& dists = scheme.distributions();
          if (static_cast<int>(dists.size()) < n)
            throw ConfigError("covariance_matrix: need one distribution per vertex");
          Eigen::Index m_max = 1;
          for (const auto& dd : dists) m_max = std::max(m_max, dd.atoms.size());
          double msize = 1.0;
          for (int c = 0; c < k; ++c) msize *= static_cast<double>(m_max);
          if (binomial(n, k) * msize > 2e8)
            throw FeasibilityError("covariance_matrix: per-vertex expectation too large");
          std::vector<int> tuple(static_cast<std::size_t>(k));
          double acc = 0.0;
          std::function<void(int, int)> rec = [&](int depth, int start) {
            if (depth == k) {
              std::vector<Eigen::Index> idx(static_cast<std::size_t>(k), 0);
              std::vector<double> u(static_cast<std::size_t>(k), 0.0);
              double expv = 0.0;
              for (;;) {
                double wgt = 1.0;
                for (int c = 0; c < k; ++c) {
                  const auto& dd = dists[static_cast<std::size_t>(tuple[static_cast<std::size_t>(c)])];
                  wgt *= dd.probs[idx[static_cast<std::size_t>(c)]];
                  u[static_cast<std::size_t>(c)] = dd.atoms[idx[static_cast<std::size_t>(c)]];
                }
                double val = si.psi(u) * sj.psi(u);
                for (const auto& e : edges)
                  val *= edge_variance(kappa(u[static_cast<std::size_t>(e.first)],
                                             u[static_cast<std::size_t>(e.second)]));
                expv += wgt * val;
                int pos = k - 1;
                for (;;) {
                  if (pos < 0) break;
                  const auto& dd = dists[static_cast<std::size_t>(tuple[static_cast<std::size_t>(pos)])];
                  if (idx[static_cast<std::size_t>(pos)] + 1 == dd.atoms.size()) {
                    idx[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                  } else
                    break;
                }
                if (pos < 0) break;
                ++idx[static_cast<std::size_t>(pos)];
              }
              double phis = 1.0;
              for (int c = 0; c < k; ++c) {
                const double t = static_cast<double>(tuple[static_cast<std::size_t>(c)] + 1) /
                                 static_cast<double>(n);
                phis *= si.phi.factor_at(c, t) * sj.phi.factor_at(c, t);
              }
              acc += phis * expv;
              return;
            }
            for (int vtx = start; vtx < n; ++vtx) {
              tuple[static_cast<std::size_t>(depth)] = vtx;
              rec(depth + 1, vtx + 1);
            }
          };
          rec(0, 0);
          v = acc / binomial(n, k);
        }
      }
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  }
  return sigma;
}

void validate_covariance(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) throw ConfigError("covariance: not square");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("covariance: not symmetric");
  if (sigma.diagonal().minCoeff() < 0.0)
    throw ConfigError("covariance: negative diagonal entry");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw ConfigError("covariance: not positive semidefinite");
}

}  // namespace gfluct
