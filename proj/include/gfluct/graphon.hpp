#pragma once

#include <Eigen/Dense>

#include "gfluct/pattern_graph.hpp"

namespace gfluct {

enum class GraphonKind { kConstant, kStep, kGrid };

// Symmetric kernel on [0,1]^2 with values in [0,1], piecewise constant on a
// product of cells. Constant and Grid are special cases of Step; keeping the
// kind allows faithful JSON round trips. A coordinate exactly on a breakpoint
// belongs to the cell on its left, except 0 which belongs to the first cell.
class Graphon {
 public:
  static Graphon constant(double p);
  static Graphon step(Eigen::VectorXd boundaries, Eigen::MatrixXd values);
  static Graphon grid(Eigen::MatrixXd values);

  GraphonKind kind() const { return kind_; }
  const Eigen::VectorXd& boundaries() const { return boundaries_; }
  const Eigen::MatrixXd& values() const { return values_; }

  int cell_count() const { return static_cast<int>(values_.rows()); }
  int cell_of(double x) const;
  double cell_width(int c) const { return boundaries_[c + 1] - boundaries_[c]; }
  double cell_value(int i, int j) const { return values_(i, j); }

  double operator()(double x, double y) const;

  bool is_constant() const { return kind_ == GraphonKind::kConstant; }
  double constant_value() const { return values_(0, 0); }

  // False when the kernel is identically 0 or identically 1.
  bool nondegenerate() const;

 private:
  GraphonKind kind_ = GraphonKind::kConstant;
  Eigen::VectorXd boundaries_;
  Eigen::MatrixXd values_;
};

// Exact integral over [0,1]^k of the product of kernel values along the edges
// of F; for a constant kernel this is p^e(F).
double homomorphism_density(const PatternGraph& F, const Graphon& kappa);

}  // namespace gfluct
