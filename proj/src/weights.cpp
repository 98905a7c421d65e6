#include "gfluct/weights.hpp"

#include <algorithm>
#include <cmath>

#include "gfluct/errors.hpp"

namespace gfluct {

StepFunction1D StepFunction1D::constant(double v) {
  StepFunction1D f;
  f.boundaries = Eigen::Vector2d(0.0, 1.0);
  f.values = Eigen::VectorXd::Constant(1, v);
  return f;
}

StepFunction1D StepFunction1D::steps(std::vector<double> boundaries,
                                     std::vector<double> values,
                                     std::vector<double> slopes) {
  StepFunction1D f;
  f.boundaries = Eigen::Map<Eigen::VectorXd>(boundaries.data(),
                                             static_cast<Eigen::Index>(boundaries.size()));
  f.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  if (!slopes.empty())
    f.slopes = Eigen::Map<Eigen::VectorXd>(slopes.data(), static_cast<Eigen::Index>(slopes.size()));
  f.validate();
  return f;
}

void StepFunction1D::validate() const {
  if (boundaries.size() < 2 || boundaries[0] != 0.0 || boundaries[boundaries.size() - 1] != 1.0)
    throw ConfigError("step function: boundaries must start at 0 and end at 1");
  for (Eigen::Index i = 0; i + 1 < boundaries.size(); ++i)
    if (!(boundaries[i] < boundaries[i + 1]))
      throw ConfigError("step function: boundaries must be strictly increasing");
  if (values.size() != boundaries.size() - 1)
    throw ConfigError("step function: need one value per cell");
  if (slopes.size() != 0 && slopes.size() != values.size())
    throw ConfigError("step function: slopes must match the cell count");
}

int StepFunction1D::cell_of(double t) const {
  if (t < 0.0 || t > 1.0) throw ConfigError("step function: argument outside [0,1]");
  // First boundary >= t among b_1..b_m; breakpoints belong to the left cell.
  const double* begin = boundaries.data() + 1;
  const double* end = boundaries.data() + boundaries.size();
  const double* it = std::lower_bound(begin, end, t);
  if (it == end) it = end - 1;
  return static_cast<int>(it - begin);
}

double StepFunction1D::operator()(double t) const {
  const int c = cell_of(t);
  return values[c] + slope(c) * t;
}

bool StepFunction1D::piecewise_constant() const {
  return slopes.size() == 0 || slopes.isZero(0.0);
}

double StepFunction1D::integral() const {
  double s = 0.0;
  for (int c = 0; c < cells(); ++c) {
    const double a = boundaries[c], b = boundaries[c + 1];
    s += values[c] * (b - a) + 0.5 * slope(c) * (b * b - a * a);
  }
  return s;
}

double StepFunction1D::max_abs() const {
  double m = 0.0;
  for (int c = 0; c < cells(); ++c) {
    const double a = boundaries[c], b = boundaries[c + 1];
    m = std::max(m, std::abs(values[c] + slope(c) * a));
    m = std::max(m, std::abs(values[c] + slope(c) * b));
  }
  return m;
}

double integral_product(const StepFunction1D& f, const StepFunction1D& g) {
  // Merge breakpoints; on each merged cell the integrand is a quadratic, so
  // Simpson's rule is exact.
  std::vector<double> pts(f.boundaries.data(), f.boundaries.data() + f.boundaries.size());
  pts.insert(pts.end(), g.boundaries.data(), g.boundaries.data() + g.boundaries.size());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const double mid = 0.5 * (a + b);
    // Evaluate inside the open cell so breakpoint conventions cannot bite.
    const int cf = f.cell_of(mid), cg = g.cell_of(mid);
    auto fv = [&](double t) { return f.values[cf] + f.slope(cf) * t; };
    auto gv = [&](double t) { return g.values[cg] + g.slope(cg) * t; };
    s += (b - a) / 6.0 * (fv(a) * gv(a) + 4.0 * fv(mid) * gv(mid) + fv(b) * gv(b));
  }
  return s;
}

WeightFunction WeightFunction::constant(double v) {
  WeightFunction w;
  w.value_ = v;
  return w;
}

WeightFunction WeightFunction::separable(std::vector<StepFunction1D> factors) {
  if (factors.empty()) throw ConfigError("weight function: empty factor list");
  for (const auto& f : factors) f.validate();
  WeightFunction w;
  w.factors_ = std::move(factors);
  return w;
}

double WeightFunction::operator()(std::span<const double> x) const {
  if (is_constant()) return value_;
  if (x.size() != factors_.size())
    throw ConfigError("weight function: arity mismatch");
  double p = 1.0;
  for (std::size_t c = 0; c < factors_.size(); ++c) p *= factors_[c](x[c]);
  return p;
}

double WeightFunction::factor_at(int coordinate, double t) const {
  if (is_constant())
    return coordinate == 0 ? value_ : 1.0;
  return factors_[static_cast<std::size_t>(coordinate)](t);
}

bool WeightFunction::piecewise_constant() const {
  for (const auto& f : factors_)
    if (!f.piecewise_constant()) return false;
  return true;
}

double WeightFunction::max_abs() const {
  if (is_constant()) return std::abs(value_);
  double p = 1.0;
  for (const auto& f : factors_) p *= f.max_abs();
  return p;
}

}  // namespace gfluct
