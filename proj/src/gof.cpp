#include "gfluct/gof.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gfluct/errors.hpp"
#include "gfluct/statistics.hpp"

namespace gfluct {

double ProbabilityMatrix::operator()(int v, int w) const {
  if (v == w) throw ConfigError("probability matrix: no diagonal entries");
  if (v > w) std::swap(v, w);
  return p[static_cast<Eigen::Index>(GraphSample::pair_index(v, w, n))];
}

void ProbabilityMatrix::validate() const {
  if (n < 2) throw ConfigError("probability matrix: need at least two vertices");
  if (p.size() != static_cast<Eigen::Index>(n) * (n - 1) / 2)
    throw ConfigError("probability matrix: packed size mismatch");
  if (p.minCoeff() < 0.0 || p.maxCoeff() > 1.0)
    throw ConfigError("probability matrix: entries outside [0,1]");
}

ProbabilityMatrix ProbabilityMatrix::constant(int n, double value) {
  ProbabilityMatrix m;
  m.n = n;
  m.p = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n) * (n - 1) / 2, value);
  m.validate();
  return m;
}

ProbabilityMatrix ProbabilityMatrix::from_graphon_lattice(const Graphon& kappa, int n) {
  ProbabilityMatrix m;
  m.n = n;
  m.p.resize(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  for (int v = 0; v < n; ++v)
    for (int w = v + 1; w < n; ++w)
      m.p[static_cast<Eigen::Index>(GraphSample::pair_index(v, w, n))] =
          kappa(static_cast<double>(v + 1) / n, static_cast<double>(w + 1) / n);
  m.validate();
  return m;
}

ProbabilityMatrix ProbabilityMatrix::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  ProbabilityMatrix m;
  m.n = n;
  m.p.resize(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  for (int v = 0; v < n; ++v) {
    if (static_cast<int>(rows[static_cast<std::size_t>(v)].size()) != n)
      throw ConfigError("probability matrix csv: not square");
    for (int w = v + 1; w < n; ++w) {
      const double a = rows[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
      const double b = rows[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)];
      if (std::abs(a - b) > 1e-12)
        throw ConfigError("probability matrix csv: not symmetric");
      m.p[static_cast<Eigen::Index>(GraphSample::pair_index(v, w, n))] = a;
    }
  }
  m.validate();
  return m;
}

double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

GofEntry higher_order_statistic(const GraphSample& observed, const ProbabilityMatrix& prob,
                                const PatternGraph& pattern) {
  if (!observed.is_binary())
    throw ConfigError("gof: observed graph must have 0/1 edges");
  if (!pattern.is_connected() || pattern.vertex_count() < 2)
    throw ConfigError("gof: pattern must be connected with at least one edge");
  if (pattern.vertex_count() > 4)
    throw FeasibilityError("gof: patterns limited to 4 vertices");
  const int n = observed.n;
  const int k = pattern.vertex_count();
  if (prob.n != n) throw ConfigError("gof: probability matrix size mismatch");
  if (n < k) throw ConfigError("gof: fewer vertices than the pattern");
  if (binomial(n, k) > 1e9)
    throw FeasibilityError("gof: tuple enumeration too large");

  Eigen::MatrixXd centred = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd vars = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v)
    for (int w = v + 1; w < n; ++w) {
      const double pv = prob(v, w);
      centred(v, w) = centred(w, v) = observed.edge(v, w) - pv;
      vars(v, w) = vars(w, v) = pv * (1.0 - pv);
    }

  std::vector<std::pair<int, int>> edges;
  for (const auto& e : pattern.edges()) edges.emplace_back(e.first - 1, e.second - 1);
  const std::vector<Eigen::VectorXd> ones(static_cast<std::size_t>(k),
                                          Eigen::VectorXd::Ones(n));
  GofEntry out;
  out.name = pattern.to_text();
  out.raw = pattern_weighted_sum(ones, edges, &centred);
  out.variance = pattern_weighted_sum(ones, edges, &vars);
  if (out.variance <= 0.0)
    throw ConfigError("gof: degenerate model, the null variance vanishes");
  out.z = out.raw / std::sqrt(out.variance);
  out.p_value = normal_two_sided_p(out.z);
  return out;
}

GofEntry t_edge(const GraphSample& observed, const ProbabilityMatrix& prob) {
  GofEntry out = higher_order_statistic(observed, prob, PatternGraph::parse("K2"));
  out.name = "edge";
  return out;
}

GofEntry t_twostar(const GraphSample& observed, const ProbabilityMatrix& prob, int center) {
  if (center < 1 || center > 3)
    throw ConfigError("gof: two-star centre must be 1, 2 or 3");
  const char* names[] = {"P3c1", "P3", "P3c3"};
  GofEntry out = higher_order_statistic(observed, prob,
                                        PatternGraph::parse(names[center - 1]));
  out.name = "twostar" + std::to_string(center);
  return out;
}

}  // namespace gfluct
