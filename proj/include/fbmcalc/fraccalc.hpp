#pragma once

// Riemann-Liouville fractional integrals and derivatives on uniform grids.
//
// Every operator integrates the kernel exactly against the piecewise-linear
// interpolant of the samples (product integration), so the singular kernel
// endpoint never has to be evaluated.  For smooth data the error is O(h^2)
// for integrals.  Left-sided operators additionally accept functions carrying
// a (t - a)^beta endpoint weight, for which the cell moments are incomplete
// beta functions.

#include "fbmcalc/grid_function.hpp"

namespace fbmcalc {

enum class Side { Left, Right };
enum class OperatorKind { Integral, Derivative };

struct DifferintegralSpec {
  double alpha = 0.5;
  Side side = Side::Left;
  OperatorKind kind = OperatorKind::Integral;

  /// Integral: alpha > 0.  Derivative: 0 < alpha < 1.
  void validate() const;
};

/// (I^alpha_{a+} f)(t_k) or (I^alpha_{b-} f)(t_k) at every node.
/// The value at the side's own endpoint is exactly zero.
GridFunction fractional_integral(const GridFunction& f, const DifferintegralSpec& spec);
GridFunction fractional_integral(const GridFunction& f, double alpha, Side side = Side::Left);

/// (D^alpha f)(t_k) through the Weyl representation
///
///     D^alpha_{a+} f(t) = [ f(t) (t-a)^-alpha + alpha * int_a^t (f(t)-f(u)) (t-u)^(-alpha-1) du ] / Gamma(1-alpha)
///
/// evaluated exactly on the interpolant.  The node at the side's own endpoint
/// carries the one-sided limit, which is +-inf when f does not vanish there.
/// Throws std::domain_error if an interior value is not finite.
GridFunction fractional_derivative(const GridFunction& f, const DifferintegralSpec& spec);
GridFunction fractional_derivative(const GridFunction& f, double alpha, Side side = Side::Left);

/// m-fold repeated integral from a, via the single-integral Cauchy formula.
/// Shares the quadrature path with fractional_integral(f, m).
GridFunction cauchy_repeated_integral(const GridFunction& f, int m);

/// Whole-line fractional integral of f extended by zero outside [a, b].
///
/// Left:  (1/Gamma(alpha)) int f(u) (t-u)_+^(alpha-1) du   (integrates from -inf up to t)
/// Right: (1/Gamma(alpha)) int f(u) (t-u)_-^(alpha-1) du   (integrates from t up to +inf)
///
/// The result lives on the grid extended by `pad_left` / `pad_right` nodes of
/// the same spacing, so values outside the support can be read off.
GridFunction whole_line_fractional_integral(const GridFunction& f, double alpha, Side side,
                                            Eigen::Index pad_left = 0, Eigen::Index pad_right = 0);

/// Fractal (Zähle) integral int_a^b f dg for 0 <= alpha <= 1:
///
///     -int D^alpha_{a+} f_{a+} * D^{1-alpha}_{b-} g_{b-} dx + f(a+) [g(b-) - g(a+)]
///
/// with f_{a+} = f - f(a+), g_{b-} = g - g(b-), boundary limits read from the
/// first/last samples.  The leading minus sign is Zähle's (-1)^alpha (-1)^(1-alpha)
/// for the unsigned right-sided derivative used here.  The outer integral is
/// the trapezoid rule.
double fractal_integral(const GridFunction& f, const GridFunction& g, double alpha);

/// Second-order finite-difference derivative (central inside, one-sided at the ends).
GridFunction finite_difference_derivative(const GridFunction& f);

/// 1/Gamma(z), zero at the poles.
double reciprocal_gamma(double z);

}  // namespace fbmcalc
