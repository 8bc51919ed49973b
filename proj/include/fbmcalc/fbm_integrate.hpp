#pragma once

// Pathwise integrals with respect to fBm sample paths.
//
// The epsilon-regularized integrals read g at s +- eps; outside [0, T] the path
// is clamped to its endpoint values.  Every eps must be a positive multiple of
// the grid spacing, so all kernels are evaluated at nodes.

#include "fbmcalc/gaussian_paths.hpp"
#include "fbmcalc/grid_function.hpp"
#include "fbmcalc/itocalc.hpp"

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace fbmcalc {

/// Strictly decreasing regularization widths.
struct EpsilonSchedule {
  std::vector<double> values;

  /// At least 3 levels, strictly decreasing, all >= h and integer multiples of h.
  void validate(double h) const;
  /// {32h, 16h, 8h, 4h, 2h}.
  static EpsilonSchedule grid_default(double h);
};

struct IntegralResult {
  double value = 0.0;
  std::vector<std::pair<double, double>> levels;  // (eps or mesh, estimate)
  bool converged = false;                         // |last - previous| <= tolerance
  double tolerance = 0.0;
  std::string diagnostic;
};

/// Cauchy tolerance on the last two levels.
struct ConvergencePolicy {
  double tolerance = 0.05;
};

/// (1/2eps) int_0^T f(s) [g(s+eps) - g(s-eps)] ds.
IntegralResult symmetric_integral(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                  ConvergencePolicy policy = {});
/// (1/eps) int_0^T f(s) [g(s+eps) - g(s)] ds.
IntegralResult forward_integral(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                ConvergencePolicy policy = {});
/// (1/eps) int_0^T f(s) [g(s-eps) - g(s)] ds, the literal kernel sign: for
/// f = 1 this tends to -(g(T) - g(0)).
IntegralResult backward_integral(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                 ConvergencePolicy policy = {});

/// (1/eps) int_0^T (x(u+eps) - x(u)) (y(u+eps) - y(u)) du.
IntegralResult covariation(const SamplePath& x, const SamplePath& y, const EpsilonSchedule& eps,
                           ConvergencePolicy policy = {});
IntegralResult covariation(const GridFunction& x, const SamplePath& y, const EpsilonSchedule& eps,
                           ConvergencePolicy policy = {});

/// Width of the end windows the clamped kernels touch: the oscillation of g
/// over [0, eps] plus over [T - eps, T].  Bounds the telescoping error for f = 1.
double boundary_tolerance(const SamplePath& g, double eps);

/// f(T) g(T) - f(0) g(0) - int g df, the Stieltjes integral by trapezoid on the grid.
double integration_by_parts_value(const GridFunction& f, const SamplePath& g);

/// Left-point Stieltjes sums sum u(t_i) [g(t_{i+1}) - g(t_i)] on dyadic
/// coarsenings (strides 2^(levels-1), ..., 1).  When u and g are long enough, a
/// variation-index heuristic checks p_u < 1/(1 - H_g) and records a warning in
/// the diagnostic if it fails; the sums are computed regardless.
IntegralResult riemann_stieltjes_integral(const GridFunction& u, const SamplePath& g, int levels = 6,
                                          ConvergencePolicy policy = {0.01});
IntegralResult riemann_stieltjes_integral(const SamplePath& u, const SamplePath& g, int levels = 6,
                                          ConvergencePolicy policy = {0.01});

struct RelationCheck {
  double symmetric = 0.0;
  double forward = 0.0;
  double cov = 0.0;
  double residual_half = 0.0;  // symmetric - forward - cov / 2
  double residual_full = 0.0;  // symmetric - forward - cov
};

/// Evaluates symmetric, forward and [f, g] on shared inputs.  Throws
/// std::domain_error if any of the three has not converged.
RelationCheck symmetric_forward_relation_check(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                               ConvergencePolicy policy = {});

/// (1/Gamma(eps)) int_0^T u^(eps-1) J(u) du with J(u) = (1/u) int_0^T f(s) [g(s+u) - g(s)] ds.
///
/// J is evaluated at log-spaced grid multiples u_j = m_j h and interpolated
/// linearly between them (held at J(h) on (0, h]); the weights of u^(eps-1)
/// against that interpolant are exact, so the weights sum to T^eps / Gamma(1+eps).
/// Levels run over eps_k = 0.01 / 2^k, k = 0..eps_levels-1.
IntegralResult extended_forward_integral(const GridFunction& f, const SamplePath& g, int eps_levels = 5,
                                         ConvergencePolicy policy = {0.02});

/// Sum of the extended-forward u-weights at one eps (should equal T^eps / Gamma(1+eps)).
double extended_forward_weight_sum(double t_max, Eigen::Index n_steps, double eps);

/// X(t_k) = x0 + sum alpha(t_i) dt + sum f(t_i) [B^H(t_{i+1}) - B^H(t_i)].
struct FractionalForwardProcess {
  double x0 = 0.0;
  Eigen::VectorXd drift;      // alpha at the nodes
  Eigen::VectorXd diffusion;  // f at the nodes
  SamplePath driver;
  Eigen::VectorXd values;
};

FractionalForwardProcess fractional_forward_process(double x0, const GridFunction& alpha, const GridFunction& f,
                                                    const SamplePath& g);

struct FbmItoCheck {
  Eigen::VectorXd lhs;  // g(t, X(t)) - g(0, X(0))
  Eigen::VectorXd rhs;  // int g_t dt + int g_x d^-X
  double max_gap = 0.0;
};

/// Itô formula without a second-order term, valid for H > 1/2.  Rejects H <= 1/2.
FbmItoCheck fbm_ito_formula_check(const Field& g, const Field& g_t, const Field& g_x,
                                  const FractionalForwardProcess& X);

}  // namespace fbmcalc
