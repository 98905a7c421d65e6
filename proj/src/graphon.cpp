#include "gfluct/graphon.hpp"

#include <algorithm>
#include <cmath>

#include "gfluct/errors.hpp"

namespace gfluct {

Graphon Graphon::constant(double p) {
  if (p < 0.0 || p > 1.0) throw ConfigError("graphon: constant value outside [0,1]");
  Graphon g;
  g.kind_ = GraphonKind::kConstant;
  g.boundaries_ = Eigen::Vector2d(0.0, 1.0);
  g.values_ = Eigen::MatrixXd::Constant(1, 1, p);
  return g;
}

Graphon Graphon::step(Eigen::VectorXd boundaries, Eigen::MatrixXd values) {
  if (boundaries.size() < 2 || boundaries[0] != 0.0 ||
      boundaries[boundaries.size() - 1] != 1.0)
    throw ConfigError("graphon: boundaries must start at 0 and end at 1");
  for (Eigen::Index i = 0; i + 1 < boundaries.size(); ++i)
    if (!(boundaries[i] < boundaries[i + 1]))
      throw ConfigError("graphon: boundaries must be strictly increasing");
  const Eigen::Index m = boundaries.size() - 1;
  if (values.rows() != m || values.cols() != m)
    throw ConfigError("graphon: value matrix must be m x m for m cells");
  if ((values - values.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw ConfigError("graphon: value matrix must be exactly symmetric");
  if (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0)
    throw ConfigError("graphon: values outside [0,1]");
  Graphon g;
  g.kind_ = GraphonKind::kStep;
  g.boundaries_ = std::move(boundaries);
  g.values_ = std::move(values);
  return g;
}

Graphon Graphon::grid(Eigen::MatrixXd values) {
  const Eigen::Index r = values.rows();
  if (r < 1) throw ConfigError("graphon: empty grid");
  Eigen::VectorXd boundaries(r + 1);
  for (Eigen::Index i = 0; i <= r; ++i)
    boundaries[i] = static_cast<double>(i) / static_cast<double>(r);
  Graphon g = step(std::move(boundaries), std::move(values));
  g.kind_ = GraphonKind::kGrid;
  return g;
}

int Graphon::cell_of(double x) const {
  if (x < 0.0 || x > 1.0) throw ConfigError("graphon: coordinate outside [0,1]");
  const double* begin = boundaries_.data() + 1;
  const double* end = boundaries_.data() + boundaries_.size();
  const double* it = std::lower_bound(begin, end, x);
  if (it == end) it = end - 1;
  return static_cast<int>(it - begin);
}

double Graphon::operator()(double x, double y) const {
  if (kind_ == GraphonKind::kConstant) {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
      throw ConfigError("graphon: coordinate outside [0,1]");
    return values_(0, 0);
  }
  return values_(cell_of(x), cell_of(y));
}

bool Graphon::nondegenerate() const {
  return !(values_.maxCoeff() == 0.0 || values_.minCoeff() == 1.0);
}

double homomorphism_density(const PatternGraph& F, const Graphon& kappa) {
  if (F.empty()) return 1.0;
  const int k = F.vertex_count();
  if (kappa.is_constant())
    return std::pow(kappa.constant_value(), F.edge_count());

  const int m = kappa.cell_count();
  double total = std::pow(static_cast<double>(m), k);
  if (total > 2e8) throw FeasibilityError("homomorphism_density: m^k too large");

  // Edges in canonical 0-based coordinates of the (sorted) vertex set.
  const PatternGraph canon = canonical_relabel(F);
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : canon.edges()) edges.emplace_back(e.first - 1, e.second - 1);

  std::vector<int> cell(static_cast<std::size_t>(k), 0);
  double sum = 0.0;
  for (;;) {
    double w = 1.0;
    for (int v = 0; v < k; ++v) w *= kappa.cell_width(cell[static_cast<std::size_t>(v)]);
    for (const auto& e : edges)
      w *= kappa.cell_value(cell[static_cast<std::size_t>(e.first)],
                            cell[static_cast<std::size_t>(e.second)]);
    sum += w;
    int pos = k - 1;
    while (pos >= 0 && cell[static_cast<std::size_t>(pos)] == m - 1) {
      cell[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++cell[static_cast<std::size_t>(pos)];
  }
  return sum;
}

}  // namespace gfluct
