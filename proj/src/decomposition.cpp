#include "gfluct/decomposition.hpp"

#include <algorithm>
#include <cmath>

#include "gfluct/errors.hpp"

namespace gfluct {

namespace {

constexpr double kZeroWeightThreshold = 1e-12;

int popcount(unsigned mask) {
  int c = 0;
  while (mask) {
    c += mask & 1u;
    mask >>= 1;
  }
  return c;
}

VertexSubset subset_from_mask(unsigned mask, int k) {
  VertexSubset a;
  for (int c = 0; c < k; ++c)
    if (mask & (1u << c)) a.push_back(c + 1);
  return a;
}

// Integrates out every coordinate not in `mask` against the atom probs; the
// result is tabulated on the full grid (constant along integrated axes).
TabulatedWeight conditional_expectation(const TabulatedWeight& tab, const AtomGrid& grid,
                                        unsigned mask) {
  const int k = static_cast<int>(tab.dims.size());
  const int m = grid.count();
  TabulatedWeight out = tab;
  for (int c = 0; c < k; ++c) {
    if (mask & (1u << c)) continue;
    // Average over axis c: stride of axis c in row-major order.
    long stride = 1;
    for (int d = c + 1; d < k; ++d) stride *= m;
    TabulatedWeight next = out;
    const long total = out.values.size();
    for (long flat = 0; flat < total; ++flat) {
      const long base = flat - ((flat / stride) % m) * stride;
      double avg = 0.0;
      for (int a = 0; a < m; ++a) avg += grid.probs[a] * out.values[base + a * stride];
      next.values[flat] = avg;
    }
    out = std::move(next);
  }
  return out;
}

std::vector<std::pair<int, int>> component_local_edges(const PatternGraph& component) {
  const auto& vs = component.vertices();
  auto rank = [&vs](int v) {
    return static_cast<int>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin());
  };
  std::vector<std::pair<int, int>> out;
  for (const auto& e : component.edges()) out.emplace_back(rank(e.first), rank(e.second));
  return out;
}

}  // namespace

int AtomGrid::locate(double label) const {
  if (kind == Kind::kCells) {
    const double* begin = boundaries.data() + 1;
    const double* end = boundaries.data() + boundaries.size();
    const double* it = std::lower_bound(begin, end, label);
    if (it == end) it = end - 1;
    return static_cast<int>(it - begin);
  }
  for (int i = 0; i < count(); ++i)
    if (std::abs(values[i] - label) < 1e-9) return i;
  throw ConfigError("atom grid: label does not match any atom");
}

AtomGrid AtomGrid::from_scheme(const LabelScheme& scheme, const Graphon& kappa) {
  AtomGrid g;
  if (scheme.kind() == LabelSchemeKind::kDiscrete) {
    if (!scheme.shared_distribution())
      throw ConfigError("atom grid: discrete labels must share one distribution");
    const auto& d = scheme.distribution(0);
    g.kind = Kind::kAtoms;
    g.values = d.atoms;
    g.probs = d.probs;
    return g;
  }
  // Uniform or lattice labels with a piecewise-constant kernel: labels reduce
  // to their kernel cell, weighted by the cell width.
  g.kind = Kind::kCells;
  g.boundaries = kappa.boundaries();
  const int m = kappa.cell_count();
  g.values.resize(m);
  g.probs.resize(m);
  for (int c = 0; c < m; ++c) {
    g.values[c] = 0.5 * (kappa.boundaries()[c] + kappa.boundaries()[c + 1]);
    g.probs[c] = kappa.cell_width(c);
  }
  return g;
}

double TabulatedWeight::at(std::span<const int> idx) const {
  long flat = 0;
  for (std::size_t c = 0; c < dims.size(); ++c)
    flat = flat * dims[c] + idx[c];
  return values[flat];
}

TabulatedWeight TabulatedWeight::tabulate(int q, int atoms,
                                          const std::function<double(std::span<const int>)>& fn) {
  TabulatedWeight t;
  t.dims.assign(static_cast<std::size_t>(q), atoms);
  long total = 1;
  for (int c = 0; c < q; ++c) total *= atoms;
  t.values.resize(total);
  std::vector<int> idx(static_cast<std::size_t>(q), 0);
  for (long flat = 0; flat < total; ++flat) {
    t.values[flat] = fn(idx);
    for (int c = q - 1; c >= 0; --c) {
      if (++idx[static_cast<std::size_t>(c)] < atoms) break;
      idx[static_cast<std::size_t>(c)] = 0;
    }
  }
  return t;
}

std::vector<std::pair<VertexSubset, TabulatedWeight>> hoeffding_project(
    const TabulatedWeight& psi, const AtomGrid& grid) {
  const int k = static_cast<int>(psi.dims.size());
  const unsigned full = (1u << k);
  std::vector<TabulatedWeight> cond(full);
  for (unsigned mask = 0; mask < full; ++mask)
    cond[mask] = conditional_expectation(psi, grid, mask);

  std::vector<std::pair<VertexSubset, TabulatedWeight>> out;
  std::vector<unsigned> masks;
  for (unsigned mask = 0; mask < full; ++mask) masks.push_back(mask);
  std::sort(masks.begin(), masks.end(), [k](unsigned a, unsigned b) {
    if (popcount(a) != popcount(b)) return popcount(a) < popcount(b);
    return subset_from_mask(a, k) < subset_from_mask(b, k);
  });
  for (unsigned amask : masks) {
    TabulatedWeight comp = psi;
    comp.values.setZero();
    // Inclusion-exclusion over subsets of A.
    for (unsigned b = amask;; b = (b - 1) & amask) {
      const double sign = (popcount(amask) - popcount(b)) % 2 == 0 ? 1.0 : -1.0;
      comp.values += sign * cond[b].values;
      if (b == 0) break;
    }
    out.emplace_back(subset_from_mask(amask, k), std::move(comp));
  }
  return out;
}

double centred_component_violation(const TabulatedWeight& component, const AtomGrid& grid,
                                   const VertexSubset& A) {
  unsigned amask = 0;
  for (int v : A) amask |= 1u << (v - 1);
  double worst = 0.0;
  for (unsigned b = amask;; b = (b - 1) & amask) {
    if (b != amask) {
      const TabulatedWeight e = conditional_expectation(component, grid, b);
      worst = std::max(worst, e.max_abs());
    }
    if (b == 0) break;
  }
  return worst;
}

TabulatedWeight restrict_to_subset(const TabulatedWeight& component, const VertexSubset& A,
                                   int k) {
  const int m = component.dims.empty() ? 1 : component.dims[0];
  const int q = static_cast<int>(A.size());
  TabulatedWeight out;
  out.dims.assign(static_cast<std::size_t>(q), m);
  long total = 1;
  for (int c = 0; c < q; ++c) total *= m;
  out.values.resize(total);
  std::vector<int> idx_full(static_cast<std::size_t>(k), 0);
  std::vector<int> idx(static_cast<std::size_t>(q), 0);
  for (long flat = 0; flat < total; ++flat) {
    for (int c = 0; c < q; ++c) idx_full[static_cast<std::size_t>(A[static_cast<std::size_t>(c)] - 1)] =
        idx[static_cast<std::size_t>(c)];
    out.values[flat] = component.at(idx_full);
    for (int c = q - 1; c >= 0; --c) {
      if (++idx[static_cast<std::size_t>(c)] < m) break;
      idx[static_cast<std::size_t>(c)] = 0;
    }
  }
  return out;
}

std::vector<ExpansionTerm> expand_edge_product(const PatternGraph& F) {
  if (F.has_isolated_vertices())
    throw ConfigError("expand_edge_product: pattern has isolated vertices");
  std::vector<ExpansionTerm> out;
  for (auto& h : edge_subgraphs(F)) {
    ExpansionTerm t;
    t.complement = edge_complement(F, h);
    t.subgraph = std::move(h);
    out.push_back(std::move(t));
  }
  return out;
}

double expansion_term_value(const ExpansionTerm& term, const Graphon& kappa,
                            std::span<const double> u,
                            const std::function<double(int, int)>& y) {
  double v = 1.0;
  for (const auto& e : term.complement.edges())
    v *= kappa(u[static_cast<std::size_t>(e.first - 1)], u[static_cast<std::size_t>(e.second - 1)]);
  for (const auto& e : term.subgraph.edges())
    v *= y(e.first, e.second) -
         kappa(u[static_cast<std::size_t>(e.first - 1)], u[static_cast<std::size_t>(e.second - 1)]);
  return v;
}

std::vector<SeparableTerm> separable_expansion(const TabulatedWeight& weight,
                                               const AtomGrid& grid) {
  const int q = static_cast<int>(weight.dims.size());
  if (q == 0) {
    SeparableTerm t;
    t.coeff = weight.values.size() ? weight.values[0] : 0.0;
    return {t};
  }
  const int m = grid.count();
  if (m == 1) {
    // One atom: the centred space is trivial, the weight must vanish.
    return {};
  }
  // Basis of the centred one-coordinate space: e_j = 1[atom j] - p_j,
  // j = 1..m-1; products over coordinates span the centred tensor space.
  Eigen::MatrixXd basis(m, m - 1);
  for (int j = 1; j < m; ++j)
    for (int i = 0; i < m; ++i) basis(i, j - 1) = (i == j ? 1.0 : 0.0) - grid.probs[j];

  long rows = 1, cols = 1;
  for (int c = 0; c < q; ++c) {
    rows *= m;
    cols *= m - 1;
  }
  Eigen::MatrixXd design(rows, cols);
  std::vector<int> gi(static_cast<std::size_t>(q), 0);
  for (long r = 0; r < rows; ++r) {
    std::vector<int> bj(static_cast<std::size_t>(q), 0);
    for (long c = 0; c < cols; ++c) {
      double v = 1.0;
      for (int d = 0; d < q; ++d)
        v *= basis(gi[static_cast<std::size_t>(d)], bj[static_cast<std::size_t>(d)]);
      design(r, c) = v;
      for (int d = q - 1; d >= 0; --d) {
        if (++bj[static_cast<std::size_t>(d)] < m - 1) break;
        bj[static_cast<std::size_t>(d)] = 0;
      }
    }
    for (int d = q - 1; d >= 0; --d) {
      if (++gi[static_cast<std::size_t>(d)] < m) break;
      gi[static_cast<std::size_t>(d)] = 0;
    }
  }
  const Eigen::VectorXd coeffs = design.colPivHouseholderQr().solve(weight.values);
  const double residual = (design * coeffs - weight.values).cwiseAbs().maxCoeff();
  if (residual > 1e-9)
    throw ConfigError("separable expansion: weight is not in the centred tensor space");

  std::vector<SeparableTerm> out;
  std::vector<int> bj(static_cast<std::size_t>(q), 0);
  for (long c = 0; c < cols; ++c) {
    if (std::abs(coeffs[c]) > 1e-15) {
      SeparableTerm t;
      t.coeff = coeffs[c];
      for (int d = 0; d < q; ++d)
        t.factor_tables.push_back(basis.col(bj[static_cast<std::size_t>(d)]));
      out.push_back(std::move(t));
    }
    for (int d = q - 1; d >= 0; --d) {
      if (++bj[static_cast<std::size_t>(d)] < m - 1) break;
      bj[static_cast<std::size_t>(d)] = 0;
    }
  }
  return out;
}

std::vector<DecompositionTerm> decompose_injective_density(const PatternGraph& F,
                                                           const Graphon& kappa,
                                                           const LabelScheme& scheme) {
  const int k = F.vertex_count();
  if (k > 4) throw FeasibilityError("decompose: patterns limited to 4 vertices");
  if (F.has_isolated_vertices())
    throw ConfigError("decompose: pattern has isolated vertices");
  if (!F.vertices().empty() && (F.vertices().front() != 1 || F.vertices().back() != k))
    throw ConfigError("decompose: pattern must live on the vertex set [k]");
  const AtomGrid grid = AtomGrid::from_scheme(scheme, kappa);
  const int m = grid.count();

  std::vector<DecompositionTerm> out;
  for (const auto& h : edge_subgraphs(F)) {
    const PatternGraph hc = edge_complement(F, h);
    const TabulatedWeight psi_h =
        TabulatedWeight::tabulate(k, m, [&](std::span<const int> idx) {
          double v = 1.0;
          for (const auto& e : hc.edges())
            v *= kappa(grid.values[idx[static_cast<std::size_t>(e.first - 1)]],
                       grid.values[idx[static_cast<std::size_t>(e.second - 1)]]);
          return v;
        });
    for (auto& [a, comp] : hoeffding_project(psi_h, grid)) {
      DecompositionTerm term;
      term.subgraph = h;
      term.vertex_set = a;
      term.grid = grid;

      VertexSubset s = h.vertices();
      for (int v : a)
        if (!std::binary_search(s.begin(), s.end(), v))
          s.insert(std::lower_bound(s.begin(), s.end(), v), v);
      term.l = static_cast<int>(s.size());
      auto rank = [&s](int v) {
        return static_cast<int>(std::lower_bound(s.begin(), s.end(), v) - s.begin());
      };
      for (const auto& e : h.edges())
        term.edge_positions.emplace_back(rank(e.first), rank(e.second));
      for (int v : a) term.a_positions.push_back(rank(v));

      term.weight = restrict_to_subset(comp, a, k);
      term.zero = term.weight.max_abs() < kZeroWeightThreshold;
      if (!term.zero) term.expansion = separable_expansion(term.weight, grid);
      out.push_back(std::move(term));
    }
  }
  return out;
}

namespace {

// Sum over tuples of pairwise-distinct indices of prod_p unary[p](a_p) times
// prod over the listed position pairs of X(a_p, a_q). Closed forms cover all
// shapes on up to three positions; larger shapes fall back to enumeration.
double distinct_tuple_sum(int l, const std::vector<std::pair<int, int>>& edges,
                          const std::vector<Eigen::VectorXd>& unary, const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(unary.empty() ? x.rows() : unary[0].size());
  if (l == 1) return unary[0].sum();
  if (l == 2) {
    if (edges.empty()) return unary[0].sum() * unary[1].sum() - unary[0].dot(unary[1]);
    return unary[0].dot(x * unary[1]);  // zero diagonal kills i = j
  }
  if (l == 3) {
    const auto& u0 = unary[0];
    const auto& u1 = unary[1];
    const auto& u2 = unary[2];
    if (edges.empty()) {
      const double s0 = u0.sum(), s1 = u1.sum(), s2 = u2.sum();
      const double s01 = u0.dot(u1), s02 = u0.dot(u2), s12 = u1.dot(u2);
      const double s012 = (u0.array() * u1.array() * u2.array()).sum();
      return s0 * s1 * s2 - s01 * s2 - s02 * s1 - s12 * s0 + 2.0 * s012;
    }
    if (edges.size() == 1) {
      const int p = edges[0].first, q = edges[0].second;
      const int r = 3 - p - q;
      const auto& up = unary[static_cast<std::size_t>(p)];
      const auto& uq = unary[static_cast<std::size_t>(q)];
      const auto& ur = unary[static_cast<std::size_t>(r)];
      const Eigen::VectorXd xq = x * uq;
      const double sr = ur.sum();
      return sr * up.dot(xq) - (up.array() * ur.array()).matrix().dot(xq) -
             up.dot(x * (uq.array() * ur.array()).matrix());
    }
    if (edges.size() == 2) {
      // A two-edge path; the shared position is the centre.
      int center;
      if (edges[0].first == edges[1].first || edges[0].first == edges[1].second)
        center = edges[0].first;
      else
        center = edges[0].second;
      const int a = edges[0].first == center ? edges[0].second : edges[0].first;
      const int b = edges[1].first == center ? edges[1].second : edges[1].first;
      const auto& uc = unary[static_cast<std::size_t>(center)];
      const auto& ua = unary[static_cast<std::size_t>(a)];
      const auto& ub = unary[static_cast<std::size_t>(b)];
      const Eigen::VectorXd xa = x * ua;
      const Eigen::VectorXd xb = x * ub;
      const Eigen::VectorXd diag = x.cwiseProduct(x) * (ua.array() * ub.array()).matrix();
      return (uc.array() * (xa.array() * xb.array() - diag.array())).sum();
    }
    // Triangle.
    if (unary[0] == unary[1] && unary[1] == unary[2]) {
      const Eigen::MatrixXd gx = unary[0].asDiagonal() * x;
      return ((gx * gx).array() * gx.transpose().array()).sum();
    }
    double s = 0.0;
    for (int i = 0; i + 2 < n; ++i)
      for (int j = i + 1; j + 1 < n; ++j)
        for (int kk = j + 1; kk < n; ++kk) {
          const double xp = x(i, j) * x(j, kk) * x(i, kk);
          if (xp == 0.0) continue;
          const double perm = u0[i] * (u1[j] * u2[kk] + u1[kk] * u2[j]) +
                              u0[j] * (u1[i] * u2[kk] + u1[kk] * u2[i]) +
                              u0[kk] * (u1[i] * u2[j] + u1[j] * u2[i]);
          s += xp * perm;
        }
    return s;
  }
  // Fallback: increasing tuples times permutations.
  if (binomial(n, l) * 24.0 > 2e8)
    throw FeasibilityError("distinct tuple sum: enumeration too large");
  std::vector<int> base(static_cast<std::size_t>(l));
  double total = 0.0;
  std::function<void(int, int)> rec = [&](int depth, int start) {
    if (depth == l) {
      std::vector<int> perm(static_cast<std::size_t>(l));
      for (int c = 0; c < l; ++c) perm[static_cast<std::size_t>(c)] = c;
      do {
        double v = 1.0;
        for (int c = 0; c < l; ++c)
          v *= unary[static_cast<std::size_t>(c)][base[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])]];
        for (const auto& e : edges)
          v *= x(base[static_cast<std::size_t>(perm[static_cast<std::size_t>(e.first)])],
                 base[static_cast<std::size_t>(perm[static_cast<std::size_t>(e.second)])]);
        total += v;
      } while (std::next_permutation(perm.begin(), perm.end()));
      return;
    }
    for (int v = start; v < n; ++v) {
      base[static_cast<std::size_t>(depth)] = v;
      rec(depth + 1, v + 1);
    }
  };
  rec(0, 0);
  return total;
}

std::vector<int> atom_indices(const DecompositionTerm& term, const GraphSample& sample) {
  return grid_atom_indices(term.grid, sample.labels);
}

}  // namespace

std::vector<int> grid_atom_indices(const AtomGrid& grid, const Eigen::VectorXd& labels) {
  std::vector<int> atom(static_cast<std::size_t>(labels.size()));
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    atom[static_cast<std::size_t>(i)] = grid.locate(labels[i]);
  return atom;
}

double term_statistic(const DecompositionTerm& term, const GraphSample& sample,
                      const Graphon& kappa) {
  if (term.l == 0) return term.weight.values.size() ? term.weight.values[0] : 0.0;
  const int n = sample.n;
  const int l = term.l;
  if (n < l) throw ConfigError("term_statistic: n < l");
  double perms = 1.0;
  for (int i = 2; i <= l; ++i) perms *= i;
  if (binomial(n, l) * perms > 2e8)
    throw FeasibilityError("term_statistic: enumeration too large");

  const Eigen::MatrixXd x = centred_edge_matrix(sample, kappa);
  const auto atom = atom_indices(term, sample);
  const int q = static_cast<int>(term.a_positions.size());

  std::vector<int> base(static_cast<std::size_t>(l));
  std::vector<int> widx(static_cast<std::size_t>(q));
  double total = 0.0;
  std::function<void(int, int)> rec = [&](int depth, int start) {
    if (depth == l) {
      std::vector<int> perm(static_cast<std::size_t>(l));
      for (int c = 0; c < l; ++c) perm[static_cast<std::size_t>(c)] = c;
      do {
        double v = 1.0;
        for (const auto& e : term.edge_positions) {
          v *= x(base[static_cast<std::size_t>(perm[static_cast<std::size_t>(e.first)])],
                 base[static_cast<std::size_t>(perm[static_cast<std::size_t>(e.second)])]);
          if (v == 0.0) break;
        }
        if (v != 0.0) {
          for (int c = 0; c < q; ++c)
            widx[static_cast<std::size_t>(c)] =
                atom[static_cast<std::size_t>(base[static_cast<std::size_t>(
                    perm[static_cast<std::size_t>(term.a_positions[static_cast<std::size_t>(c)])])])];
          total += v * term.weight.at(widx);
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      return;
    }
    for (int v = start; v < n; ++v) {
      base[static_cast<std::size_t>(depth)] = v;
      rec(depth + 1, v + 1);
    }
  };
  rec(0, 0);
  return total / falling_factorial(n, l);
}

double term_statistic_fast_pre(const DecompositionTerm& term, const Eigen::MatrixXd& x,
                               const std::vector<int>& atom) {
  if (term.l == 0) return term.weight.values.size() ? term.weight.values[0] : 0.0;
  if (term.zero || term.expansion.empty()) return 0.0;
  const int n = static_cast<int>(x.rows());
  double total = 0.0;
  for (const auto& st : term.expansion) {
    std::vector<Eigen::VectorXd> unary(static_cast<std::size_t>(term.l),
                                       Eigen::VectorXd::Ones(n));
    for (std::size_t c = 0; c < term.a_positions.size(); ++c) {
      Eigen::VectorXd& u = unary[static_cast<std::size_t>(term.a_positions[c])];
      for (int i = 0; i < n; ++i) u[i] = st.factor_tables[c][atom[static_cast<std::size_t>(i)]];
    }
    total += st.coeff * distinct_tuple_sum(term.l, term.edge_positions, unary, x);
  }
  return total / falling_factorial(n, term.l);
}

double term_statistic_fast(const DecompositionTerm& term, const GraphSample& sample,
                           const Graphon& kappa) {
  if (term.l == 0) return term.weight.values.size() ? term.weight.values[0] : 0.0;
  return term_statistic_fast_pre(term, centred_edge_matrix(sample, kappa),
                                 atom_indices(term, sample));
}

std::vector<ProductTerm> product_approximation(const DecompositionTerm& term) {
  const PatternGraph joined = union_with_vertices(term.subgraph, term.vertex_set);
  const auto components = joined.connected_components();
  if (components.size() < 2)
    throw ConfigError("product_approximation: the term is connected, nothing to split");

  std::vector<ProductTerm> out;
  for (const auto& st : term.expansion) {
    ProductTerm pt;
    pt.coeff = st.coeff;
    for (const auto& comp : components) {
      ComponentFactor f;
      f.component = canonical_relabel(comp);
      f.size = comp.vertex_count();
      f.edge_positions = component_local_edges(comp);
      const auto& vs = comp.vertices();
      for (std::size_t c = 0; c < term.vertex_set.size(); ++c) {
        const int v = term.vertex_set[c];
        const auto it = std::lower_bound(vs.begin(), vs.end(), v);
        if (it != vs.end() && *it == v) {
          f.a_slots.push_back(static_cast<int>(it - vs.begin()));
          f.factor_tables.push_back(st.factor_tables[c]);
        }
      }
      pt.components.push_back(std::move(f));
    }
    out.push_back(std::move(pt));
  }
  return out;
}

double evaluate_product_terms(const std::vector<ProductTerm>& products,
                              const DecompositionTerm& term, const GraphSample& sample,
                              const Graphon& kappa) {
  const int n = sample.n;
  const Eigen::MatrixXd x = centred_edge_matrix(sample, kappa);
  const auto atom = atom_indices(term, sample);
  double total = 0.0;
  for (const auto& pt : products) {
    double prod = pt.coeff;
    for (const auto& f : pt.components) {
      std::vector<Eigen::VectorXd> unary(static_cast<std::size_t>(f.size),
                                         Eigen::VectorXd::Ones(n));
      for (std::size_t c = 0; c < f.a_slots.size(); ++c) {
        Eigen::VectorXd& u = unary[static_cast<std::size_t>(f.a_slots[c])];
        for (int i = 0; i < n; ++i) u[i] = f.factor_tables[c][atom[static_cast<std::size_t>(i)]];
      }
      prod *= distinct_tuple_sum(f.size, f.edge_positions, unary, x) /
              falling_factorial(n, f.size);
    }
    total += prod;
  }
  return total;
}

}  // namespace gfluct
