#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace gfluct {

// Piecewise-linear function on [0,1]: on cell c (between boundaries[c] and
// boundaries[c+1]) the value is values[c] + slopes[c] * t. Slopes default to
// zero, giving an ordinary step function. A point exactly on a breakpoint
// belongs to the cell on its left, except 0 which belongs to the first cell.
struct StepFunction1D {
  Eigen::VectorXd boundaries;  // 0 = b_0 < ... < b_m = 1
  Eigen::VectorXd values;      // m entries
  Eigen::VectorXd slopes;      // m entries, may be empty (all zero)

  static StepFunction1D constant(double v);
  static StepFunction1D steps(std::vector<double> boundaries, std::vector<double> values,
                              std::vector<double> slopes = {});

  void validate() const;
  int cells() const { return static_cast<int>(values.size()); }
  int cell_of(double t) const;
  double operator()(double t) const;
  bool piecewise_constant() const;
  double slope(int c) const { return slopes.size() ? slopes[c] : 0.0; }

  double integral() const;  // exact
  double max_abs() const;   // max of |f| over [0,1]
};

// Exact integral over [0,1] of f * g (piecewise quadratic; Simpson per cell).
double integral_product(const StepFunction1D& f, const StepFunction1D& g);

// Weight attached to a statistic coordinate: either a constant (usable at any
// arity) or a product of per-coordinate piecewise-linear factors.
class WeightFunction {
 public:
  static WeightFunction constant(double v);
  static WeightFunction separable(std::vector<StepFunction1D> factors);

  bool is_constant() const { return factors_.empty(); }
  double constant_value() const { return value_; }
  const std::vector<StepFunction1D>& factors() const { return factors_; }

  // Number of coordinates; 0 for a constant (compatible with any arity).
  int arity() const { return static_cast<int>(factors_.size()); }

  double operator()(std::span<const double> x) const;
  double factor_at(int coordinate, double t) const;

  bool piecewise_constant() const;
  double max_abs() const;

 private:
  double value_ = 1.0;
  std::vector<StepFunction1D> factors_;
};

}  // namespace gfluct
