#pragma once

#include <Eigen/Core>

#include <cmath>
#include <utility>

namespace fbmcalc {

/// Real function sampled on the closed uniform grid t_k = a + k(b-a)/n, k = 0..n.
///
/// An optional left-endpoint power weight lets the grid represent functions
/// that are singular (or have a fractional power) at `a`:
///
///     f(t) = (t - a)^beta * phi(t)
///
/// where `values()` holds the samples of the regular factor phi.  With the
/// default beta = 0 the samples are the function itself.  Left-sided
/// fractional operators integrate the weight exactly; everything else
/// requires an unweighted function.
class GridFunction {
 public:
  GridFunction(double a, double b, Eigen::VectorXd values, double left_exponent = 0.0);

  /// Samples `f` at the n + 1 grid nodes.
  template <typename F>
  static GridFunction sample(double a, double b, Eigen::Index n, F&& f) {
    Eigen::VectorXd v(n + 1);
    const double h = (b - a) / static_cast<double>(n);
    for (Eigen::Index k = 0; k <= n; ++k) v[k] = f(k == n ? b : a + static_cast<double>(k) * h);
    return GridFunction(a, b, std::move(v));
  }

  /// Output of an operator whose one-sided limit at an endpoint may be +-inf.
  /// Only interior samples are required to be finite.
  static GridFunction with_endpoint_limits(double a, double b, Eigen::VectorXd values);

  double a() const { return a_; }
  double b() const { return b_; }
  Eigen::Index intervals() const { return values_.size() - 1; }
  double spacing() const { return (b_ - a_) / static_cast<double>(intervals()); }
  double node(Eigen::Index k) const {
    return k == intervals() ? b_ : a_ + static_cast<double>(k) * spacing();
  }
  Eigen::VectorXd nodes() const;

  const Eigen::VectorXd& values() const { return values_; }
  double left_exponent() const { return left_exponent_; }
  bool weighted() const { return left_exponent_ != 0.0; }

  /// Function value at node k, weight included.
  double operator()(Eigen::Index k) const;
  /// All node values with the weight applied.
  Eigen::VectorXd evaluated() const;

  /// (Rf)(t) = f(a + b - t), applied by index reversal.
  GridFunction reflected() const;

  bool same_grid(const GridFunction& other) const;

 private:
  struct Unchecked {};
  GridFunction(Unchecked, double a, double b, Eigen::VectorXd values);

  double a_;
  double b_;
  Eigen::VectorXd values_;
  double left_exponent_ = 0.0;
};

/// Composite trapezoid rule over the whole grid (unweighted functions only).
double trapezoid(const GridFunction& f);

/// Running trapezoid integral from a, one value per node.
Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& values, double h);

}  // namespace fbmcalc
