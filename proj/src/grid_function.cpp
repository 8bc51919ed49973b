#include "fbmcalc/grid_function.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace fbmcalc {

namespace {

void check_domain(double a, double b, Eigen::Index size) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(b > a))
    throw std::invalid_argument("GridFunction: need finite a < b");
  if (size < 3) throw std::invalid_argument("GridFunction: need at least 2 intervals");
  // Spacing must stay resolvable in floating point.
  const double h = (b - a) / static_cast<double>(size - 1);
  if (!(a + h > a) || !(b - h < b)) throw std::invalid_argument("GridFunction: degenerate spacing");
}

}  // namespace

GridFunction::GridFunction(double a, double b, Eigen::VectorXd values, double left_exponent)
    : a_(a), b_(b), values_(std::move(values)), left_exponent_(left_exponent) {
  check_domain(a_, b_, values_.size());
  if (!values_.allFinite()) throw std::invalid_argument("GridFunction: non-finite sample");
  if (!std::isfinite(left_exponent_) || left_exponent_ <= -1.0)
    throw std::invalid_argument("GridFunction: left exponent must be finite and > -1");
}

GridFunction::GridFunction(Unchecked, double a, double b, Eigen::VectorXd values)
    : a_(a), b_(b), values_(std::move(values)) {}

GridFunction GridFunction::with_endpoint_limits(double a, double b, Eigen::VectorXd values) {
  check_domain(a, b, values.size());
  const Eigen::Index n = values.size() - 1;
  if (!values.segment(1, n - 1).allFinite())
    throw std::domain_error("GridFunction: non-finite interior value");
  for (Eigen::Index k : {Eigen::Index{0}, n})
    if (std::isnan(values[k])) throw std::domain_error("GridFunction: NaN endpoint value");
  return GridFunction(Unchecked{}, a, b, std::move(values));
}

Eigen::VectorXd GridFunction::nodes() const {
  Eigen::VectorXd t(values_.size());
  for (Eigen::Index k = 0; k < t.size(); ++k) t[k] = node(k);
  return t;
}

double GridFunction::operator()(Eigen::Index k) const {
  if (!weighted()) return values_[k];
  if (k == 0) {
    if (values_[0] == 0.0 || left_exponent_ > 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), values_[0]);
  }
  return std::pow(node(k) - a_, left_exponent_) * values_[k];
}

Eigen::VectorXd GridFunction::evaluated() const {
  if (!weighted()) return values_;
  Eigen::VectorXd out(values_.size());
  for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = (*this)(k);
  return out;
}

GridFunction GridFunction::reflected() const {
  if (weighted()) throw std::invalid_argument("reflected: weighted functions have no mirror image");
  return GridFunction(Unchecked{}, a_, b_, values_.reverse());
}

bool GridFunction::same_grid(const GridFunction& other) const {
  return a_ == other.a_ && b_ == other.b_ && values_.size() == other.values_.size();
}

double trapezoid(const GridFunction& f) {
  if (f.weighted()) throw std::invalid_argument("trapezoid: weighted function");
  const auto& v = f.values();
  const Eigen::Index n = f.intervals();
  return f.spacing() * (v.segment(1, n - 1).sum() + 0.5 * (v[0] + v[n]));
}

Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& values, double h) {
  Eigen::VectorXd out(values.size());
  if (values.size() == 0) return out;
  out[0] = 0.0;
  for (Eigen::Index k = 1; k < values.size(); ++k)
    out[k] = out[k - 1] + 0.5 * h * (values[k - 1] + values[k]);
  return out;
}

}  // namespace fbmcalc
