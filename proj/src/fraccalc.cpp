#include "fbmcalc/fraccalc.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbmcalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Unweighted product-integration weights.
//
// For the piecewise-linear interpolant on a uniform grid,
//   Gamma(alpha+2) h^-alpha (I^alpha_{a+} f)(t_k) = a0_k f_0 + sum_{j=1}^{k-1} c_{k-j} f_j + f_k
// with c_m = (m+1)^p - 2 m^p + (m-1)^p, a0_k = (k-1)^p - (k-1-alpha) k^alpha, p = alpha + 1.
// Both are evaluated in factored expm1/log1p form to avoid cancellation at large m.

double interior_weight(Eigen::Index m, double alpha) {
  const double p = alpha + 1.0;
  if (m == 1) return std::pow(2.0, p) - 2.0;
  const double x = 1.0 / static_cast<double>(m);
  return std::pow(static_cast<double>(m), p) *
         (std::expm1(p * std::log1p(x)) + std::expm1(p * std::log1p(-x)));
}

double first_weight(Eigen::Index k, double alpha) {
  const double p = alpha + 1.0;
  if (k == 1) return alpha;
  const double x = 1.0 / static_cast<double>(k);
  return std::pow(static_cast<double>(k), p) * (std::expm1(p * std::log1p(-x)) + p * x);
}

struct IntegralWeights {
  Eigen::VectorXd interior;  // interior[m], m = 1..n-1 (index 0 unused)
  Eigen::VectorXd reversed;  // reversed[i] = interior[n-1-i]
  Eigen::VectorXd first;     // first[k], k = 1..n
  double scale;              // h^alpha / Gamma(alpha + 2)
};

IntegralWeights integral_weights(Eigen::Index n, double h, double alpha) {
  IntegralWeights w;
  w.interior = Eigen::VectorXd::Zero(n);
  for (Eigen::Index m = 1; m < n; ++m) w.interior[m] = interior_weight(m, alpha);
  w.reversed = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n - 1; ++i) w.reversed[i] = w.interior[n - 1 - i];
  w.first = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index k = 1; k <= n; ++k) w.first[k] = first_weight(k, alpha);
  w.scale = std::pow(h, alpha) / std::tgamma(alpha + 2.0);
  return w;
}

Eigen::VectorXd left_integral_plain(const Eigen::VectorXd& f, double h, double alpha) {
  const Eigen::Index n = f.size() - 1;
  const IntegralWeights w = integral_weights(n, h, alpha);
  Eigen::VectorXd out(n + 1);
  out[0] = 0.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    double s = w.first[k] * f[0] + f[k];
    if (k > 1) s += f.segment(1, k - 1).dot(w.reversed.segment(n - k, k - 1));
    out[k] = w.scale * s;
  }
  return out;
}

Eigen::VectorXd right_integral_plain(const Eigen::VectorXd& f, double h, double alpha) {
  const Eigen::Index n = f.size() - 1;
  const IntegralWeights w = integral_weights(n, h, alpha);
  Eigen::VectorXd out(n + 1);
  out[n] = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index span = n - k;
    double s = w.first[span] * f[n] + f[k];
    if (span > 1) s += f.segment(k + 1, span - 1).dot(w.interior.segment(1, span - 1));
    out[k] = w.scale * s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weyl representation on the interpolant, left side.
//
// On the cell m = k - j steps behind t_k, with s = t_k - u,
//   f(t_k) - f(u) = c_j + d_j s/h,   c_j = f_k - f_j - m d_j,  d_j = f_{j+1} - f_j,
// so the singular integral reduces to the exact moments
//   int s^(-alpha-1) ds = h^-alpha a_m,   (1/h) int s^-alpha ds = h^-alpha b_m.
// On the last cell c_j = 0 identically and only d_{k-1} b_1 survives.

Eigen::VectorXd left_derivative_plain(const Eigen::VectorXd& f, double h, double alpha) {
  const Eigen::Index n = f.size() - 1;
  // a[m], e[m] = b[m] - m a[m] for m = 2..n, stored reversed for contiguous dot products.
  Eigen::VectorXd a_rev = Eigen::VectorXd::Zero(n + 1);
  Eigen::VectorXd e_rev = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index m = 2; m <= n; ++m) {
    const double md = static_cast<double>(m);
    const double l = std::log1p(-1.0 / md);
    const double am = std::pow(md, -alpha) * std::expm1(-alpha * l) / alpha;
    const double em = std::pow(md, 1.0 - alpha) *
                      (-std::expm1((1.0 - alpha) * l) / (1.0 - alpha) - std::expm1(-alpha * l) / alpha);
    a_rev[n - m] = am;
    e_rev[n - m] = em;
  }
  const double b1 = 1.0 / (1.0 - alpha);
  const Eigen::VectorXd d = f.tail(n) - f.head(n);
  const double scale = std::pow(h, -alpha) / std::tgamma(1.0 - alpha);

  Eigen::VectorXd out(n + 1);
  out[0] = f[0] == 0.0 ? 0.0 : std::copysign(kInf, f[0]);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    const double boundary = f[k] * std::pow(kd, -alpha);
    double integral = d[k - 1] * b1;
    if (k >= 2) {
      // sum over m = 2..k of c_{k-m} a_m + d_{k-m} b_m, with sum a_m = (1 - k^-alpha)/alpha.
      const Eigen::Index len = k - 1;  // j = 0..k-2
      const auto a_seg = a_rev.segment(n - k, len);
      const auto e_seg = e_rev.segment(n - k, len);
      integral += f[k] * (-std::expm1(-alpha * std::log(kd)) / alpha) - f.head(len).dot(a_seg) +
                  d.head(len).dot(e_seg);
    }
    out[k] = scale * (boundary + alpha * integral);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted (f = (t-a)^beta phi) left-sided operators.
//
// phi is interpolated linearly, phi(u) = A_j + B_j u on cell j (u measured
// from a).  Cell moments of u^(beta+q) against the kernel are incomplete beta
// functions in x = u/T, T = t_k - a.  Summation by parts moves every cell
// boundary onto the kinks of phi (nodes where B_j changes), so a phi that is
// linear costs O(1) special-function calls per node.

struct LinearPieces {
  Eigen::VectorXd slope;      // B_j, j = 0..n-1
  Eigen::VectorXd intercept;  // A_j
  std::vector<Eigen::Index> kinks;
};

LinearPieces linear_pieces(const Eigen::VectorXd& phi, double h) {
  const Eigen::Index n = phi.size() - 1;
  LinearPieces lp;
  lp.slope = (phi.tail(n) - phi.head(n)) / h;
  lp.intercept.resize(n);
  for (Eigen::Index j = 0; j < n; ++j)
    lp.intercept[j] = phi[j] - lp.slope[j] * (static_cast<double>(j) * h);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index j = 1; j < n; ++j) {
    const double second = phi[j + 1] - 2.0 * phi[j] + phi[j - 1];
    const double size = std::abs(phi[j + 1]) + 2.0 * std::abs(phi[j]) + std::abs(phi[j - 1]);
    if (std::abs(second) > 4.0 * eps * size) lp.kinks.push_back(j);
  }
  return lp;
}

// Limit of c * t^e as t -> 0+.
double power_limit(double c, double e) {
  if (c == 0.0 || e > 0.0) return 0.0;
  if (e == 0.0) return c;
  return std::copysign(kInf, c);
}

// Limit of c0 t^e0 + c1 t^e1 (e0 < e1) as t -> 0+.
double two_term_limit(double c0, double e0, double c1, double e1) {
  if (c0 != 0.0 && e0 < 0.0) return power_limit(c0, e0);
  return power_limit(c0, e0) + power_limit(c1, e1);
}

Eigen::VectorXd left_integral_weighted(const GridFunction& f, double alpha) {
  namespace bm = boost::math;
  const Eigen::VectorXd& phi = f.values();
  const Eigen::Index n = f.intervals();
  const double h = f.spacing();
  const double beta = f.left_exponent();
  const LinearPieces lp = linear_pieces(phi, h);
  const double a0 = beta + 1.0;
  const double a1 = beta + 2.0;
  const double full0 = bm::beta(a0, alpha);
  const double full1 = bm::beta(a1, alpha);
  const double inv_gamma = 1.0 / std::tgamma(alpha);

  Eigen::VectorXd out(n + 1);
  // Leading behaviour on the first cell: A_0 u^beta + B_0 u^(beta+1).
  out[0] = two_term_limit(lp.intercept[0] * full0 * inv_gamma, beta + alpha,
                          lp.slope[0] * full1 * inv_gamma, beta + alpha + 1.0);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double T = static_cast<double>(k) * h;
    double s = lp.intercept[k - 1] * std::pow(T, beta + alpha) * full0 +
               lp.slope[k - 1] * std::pow(T, beta + alpha + 1.0) * full1;
    double kink_sum = 0.0;
    for (Eigen::Index j : lp.kinks) {
      if (j >= k) break;
      const double x = static_cast<double>(j) / static_cast<double>(k);
      const double jump = lp.slope[j - 1] - lp.slope[j];
      kink_sum += jump * (bm::beta(a1, alpha, x) - x * bm::beta(a0, alpha, x));
    }
    s += std::pow(T, beta + alpha + 1.0) * kink_sum;
    out[k] = inv_gamma * s;
  }
  return out;
}

// Hadamard finite-part form D^alpha f = (1/Gamma(-alpha)) fp int f(u) (t-u)^(-alpha-1) du,
// which is the Weyl representation after integrating its boundary term.
// With 1/Gamma(-alpha) folded in, the continued incomplete beta reads
//   G_q(x) = [(a_q - alpha) B_x(a_q, 1-alpha) - x^a_q (1-x)^-alpha] / Gamma(1-alpha),  x < 1
//   G_q(1) = Gamma(a_q) / Gamma(a_q - alpha)
// for a_q = beta + q + 1.
Eigen::VectorXd left_derivative_weighted(const GridFunction& f, double alpha) {
  namespace bm = boost::math;
  const Eigen::VectorXd& phi = f.values();
  const Eigen::Index n = f.intervals();
  const double h = f.spacing();
  const double beta = f.left_exponent();
  const LinearPieces lp = linear_pieces(phi, h);
  const double a0 = beta + 1.0;
  const double a1 = beta + 2.0;
  const double full0 = std::tgamma(a0) * reciprocal_gamma(a0 - alpha);
  const double full1 = std::tgamma(a1) * reciprocal_gamma(a1 - alpha);
  const double inv_g1 = 1.0 / std::tgamma(1.0 - alpha);
  auto partial = [&](double a, double x) {
    return ((a - alpha) * bm::beta(a, 1.0 - alpha, x) - std::pow(x, a) * std::pow(1.0 - x, -alpha)) *
           inv_g1;
  };

  Eigen::VectorXd out(n + 1);
  out[0] = two_term_limit(lp.intercept[0] * full0, beta - alpha, lp.slope[0] * full1,
                          beta + 1.0 - alpha);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double T = static_cast<double>(k) * h;
    double s = lp.intercept[k - 1] * std::pow(T, beta - alpha) * full0 +
               lp.slope[k - 1] * std::pow(T, beta + 1.0 - alpha) * full1;
    double kink_sum = 0.0;
    for (Eigen::Index j : lp.kinks) {
      if (j >= k) break;
      const double x = static_cast<double>(j) / static_cast<double>(k);
      const double jump = lp.slope[j - 1] - lp.slope[j];
      kink_sum += jump * (partial(a1, x) - x * partial(a0, x));
    }
    s += std::pow(T, beta + 1.0 - alpha) * kink_sum;
    out[k] = s;
  }
  return out;
}

void require_interior_finite(const Eigen::VectorXd& v, const char* what) {
  const Eigen::Index n = v.size() - 1;
  if (!v.segment(1, n - 1).allFinite())
    throw std::domain_error(std::string(what) + ": non-finite interior value (integrand too rough for the grid)");
}

}  // namespace

void DifferintegralSpec::validate() const {
  if (!std::isfinite(alpha)) throw std::invalid_argument("order must be finite");
  if (kind == OperatorKind::Integral && !(alpha > 0.0))
    throw std::invalid_argument("fractional integral needs alpha > 0");
  if (kind == OperatorKind::Derivative && !(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("fractional derivative needs 0 < alpha < 1");
}

double reciprocal_gamma(double z) {
  if (z <= 0.0 && z == std::floor(z)) return 0.0;
  return 1.0 / std::tgamma(z);
}

GridFunction fractional_integral(const GridFunction& f, const DifferintegralSpec& spec) {
  if (spec.kind != OperatorKind::Integral)
    throw std::invalid_argument("fractional_integral: spec.kind must be Integral");
  spec.validate();
  if (f.weighted()) {
    if (spec.side != Side::Left)
      throw std::invalid_argument("fractional_integral: endpoint weight supported for left side only");
    return GridFunction::with_endpoint_limits(f.a(), f.b(), left_integral_weighted(f, spec.alpha));
  }
  Eigen::VectorXd out = spec.side == Side::Left
                            ? left_integral_plain(f.values(), f.spacing(), spec.alpha)
                            : right_integral_plain(f.values(), f.spacing(), spec.alpha);
  return GridFunction(f.a(), f.b(), std::move(out));
}

GridFunction fractional_integral(const GridFunction& f, double alpha, Side side) {
  return fractional_integral(f, DifferintegralSpec{alpha, side, OperatorKind::Integral});
}

GridFunction fractional_derivative(const GridFunction& f, const DifferintegralSpec& spec) {
  if (spec.kind != OperatorKind::Derivative)
    throw std::invalid_argument("fractional_derivative: spec.kind must be Derivative");
  spec.validate();
  Eigen::VectorXd out;
  if (f.weighted()) {
    if (spec.side != Side::Left)
      throw std::invalid_argument("fractional_derivative: endpoint weight supported for left side only");
    out = left_derivative_weighted(f, spec.alpha);
  } else if (spec.side == Side::Left) {
    out = left_derivative_plain(f.values(), f.spacing(), spec.alpha);
  } else {
    // D_{b-} = R D_{a+} R.
    out = left_derivative_plain(f.values().reverse(), f.spacing(), spec.alpha).reverse();
  }
  require_interior_finite(out, "fractional_derivative");
  return GridFunction::with_endpoint_limits(f.a(), f.b(), std::move(out));
}

GridFunction fractional_derivative(const GridFunction& f, double alpha, Side side) {
  return fractional_derivative(f, DifferintegralSpec{alpha, side, OperatorKind::Derivative});
}

GridFunction cauchy_repeated_integral(const GridFunction& f, int m) {
  if (m < 1) throw std::invalid_argument("cauchy_repeated_integral: m must be >= 1");
  return fractional_integral(f, static_cast<double>(m), Side::Left);
}

GridFunction whole_line_fractional_integral(const GridFunction& f, double alpha, Side side,
                                            Eigen::Index pad_left, Eigen::Index pad_right) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("whole_line_fractional_integral: alpha must lie in (0,1)");
  if (f.weighted()) throw std::invalid_argument("whole_line_fractional_integral: weighted function");
  if (pad_left < 0 || pad_right < 0) throw std::invalid_argument("whole_line_fractional_integral: negative padding");
  const Eigen::Index n = f.intervals();
  const double h = f.spacing();
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(n + 1 + pad_left + pad_right);
  padded.segment(pad_left, n + 1) = f.values();
  const GridFunction extended(f.a() - static_cast<double>(pad_left) * h,
                              f.b() + static_cast<double>(pad_right) * h, std::move(padded));
  return fractional_integral(extended, alpha, side);
}

GridFunction finite_difference_derivative(const GridFunction& f) {
  if (f.weighted()) throw std::invalid_argument("finite_difference_derivative: weighted function");
  const auto& v = f.values();
  const Eigen::Index n = f.intervals();
  const double h = f.spacing();
  Eigen::VectorXd d(n + 1);
  for (Eigen::Index k = 1; k < n; ++k) d[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
  return GridFunction(f.a(), f.b(), std::move(d));
}

double fractal_integral(const GridFunction& f, const GridFunction& g, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("fractal_integral: alpha must lie in [0,1]");
  if (!f.same_grid(g)) throw std::invalid_argument("fractal_integral: f and g must share a grid");
  if (f.weighted() || g.weighted()) throw std::invalid_argument("fractal_integral: weighted function");
  const Eigen::Index n = f.intervals();
  const double f_a = f.values()[0];
  const double g_a = g.values()[0];
  const double g_b = g.values()[n];

  const GridFunction f_shift(f.a(), f.b(), f.values().array() - f_a);
  const GridFunction g_shift(g.a(), g.b(), g.values().array() - g_b);

  Eigen::VectorXd df;
  if (alpha == 0.0)
    df = f_shift.values();
  else if (alpha == 1.0)
    df = finite_difference_derivative(f_shift).values();
  else
    df = fractional_derivative(f_shift, alpha, Side::Left).values();

  const double beta = 1.0 - alpha;
  Eigen::VectorXd dg;
  if (beta == 0.0)
    dg = g_shift.values();
  else if (beta == 1.0)
    dg = -finite_difference_derivative(g_shift).values();  // D^1_{b-} = -d/dx
  else
    dg = fractional_derivative(g_shift, beta, Side::Right).values();

  const Eigen::VectorXd product = df.cwiseProduct(dg);
  if (!product.allFinite())
    throw std::domain_error("fractal_integral: non-finite fractional derivative (roughness mismatch)");
  const double h = f.spacing();
  const double inner = h * (product.segment(1, n - 1).sum() + 0.5 * (product[0] + product[n]));
  return -inner + f_a * (g_b - g_a);
}

}  // namespace fbmcalc
