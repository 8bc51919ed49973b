#pragma once

// Itô integration against Brownian sample paths with left-endpoint sums.

#include "fbmcalc/ensemble.hpp"
#include "fbmcalc/errors.hpp"
#include "fbmcalc/gaussian_paths.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>

namespace fbmcalc {

/// Read access to a path up to and including node `last`.  Anything later
/// throws AdaptednessError, so integrands cannot look ahead.
class PathPrefix {
 public:
  PathPrefix(const SamplePath& path, Eigen::Index last);

  Eigen::Index last() const { return last_; }
  double time() const { return path_->times[last_]; }
  double current() const { return path_->values[last_]; }
  double value(Eigen::Index k) const;
  double time_at(Eigen::Index k) const;
  /// Linear interpolation at time s <= time().
  double value_at_time(double s) const;

 private:
  const SamplePath* path_;
  Eigen::Index last_;
};

/// Adapted integrand: f(t, prefix of the driving path up to t).
using AdaptedIntegrand = std::function<double(double, const PathPrefix&)>;

namespace integrands {
AdaptedIntegrand constant(double c);
/// f(t) = B(t).
AdaptedIntegrand path_value();
AdaptedIntegrand deterministic(std::function<double(double)> fn);
AdaptedIntegrand linear_combination(double a, AdaptedIntegrand f, double b, AdaptedIntegrand g);
}  // namespace integrands

/// sum_i f(t_i, prefix_i) [B(t_{i+1}) - B(t_i)] over `partition` (times that
/// must coincide with path nodes, nondecreasing), or over the path grid when
/// the partition is empty.  Repeated times contribute zero.
double ito_integral(const AdaptedIntegrand& f, const SamplePath& path, std::span<const double> partition = {});

/// Running left-point integral at every node, starting at 0.
Eigen::VectorXd ito_running_integral(const AdaptedIntegrand& f, const SamplePath& path);

/// Replicated paths drawn on demand by replicate index.
struct PathEnsemble {
  std::size_t replicates = 0;
  std::function<SamplePath(std::size_t)> draw;
  unsigned workers = 0;
};

/// Brownian ensemble: replicate i uses stream i of `root`.
PathEnsemble bm_ensemble(const GridSpec& grid, std::uint64_t root, std::size_t replicates, unsigned workers = 0);

struct EndpointComparison {
  EnsembleStats left;   // sum B(t_i) dB_i
  EnsembleStats right;  // sum B(t_{i+1}) dB_i
  bool wide_ci = false; // fewer than 1000 replicates
};

/// Means of the left- and right-endpoint sums of B dB; every path must end at T.
EndpointComparison endpoint_comparison(const PathEnsemble& ensemble, double T);

struct IsometryResult {
  double lhs = 0.0;         // mean of (int f dB)^2
  double rhs = 0.0;         // mean of int f^2 dt (trapezoid)
  double ci = 0.0;          // z * standard error of the paired difference
  double bias_bound = 0.0;  // mean |trapezoid - left Riemann| of int f^2 dt
  std::size_t replicates = 0;

  bool agrees() const;  // |lhs - rhs| <= ci + bias_bound
};

/// Requires at least 1000 replicates.
IsometryResult isometry_check(const AdaptedIntegrand& f, const PathEnsemble& ensemble, double z = 3.0);

struct QuadraticVariationCheck {
  double qv = 0.0;      // sum of squared increments of the running integral
  double target = 0.0;  // int f^2 dt (trapezoid)
};

QuadraticVariationCheck ito_integral_qv(const AdaptedIntegrand& f, const SamplePath& path);

/// X(t_k) = x0 + sum mu(t_i) dt + sum nu(t_i) dB_i, coefficients read at left endpoints.
struct ItoProcess {
  double x0 = 0.0;
  AdaptedIntegrand drift;
  AdaptedIntegrand diffusion;
  SamplePath driving_path;

  Eigen::VectorXd realize() const;
};

/// Real-valued function of (t, x).
using Field = std::function<double(double, double)>;

struct ItoFormulaPaths {
  Eigen::VectorXd lhs;  // g(t, X(t)) - g(0, X(0))
  Eigen::VectorXd rhs;  // int g_t dt + int g_x dX + 1/2 int g_xx nu^2 dt
  double endpoint_gap() const { return std::abs(lhs[lhs.size() - 1] - rhs[rhs.size() - 1]); }
  double max_gap() const { return (lhs - rhs).cwiseAbs().maxCoeff(); }
};

/// Both sides of the Itô formula along one realized path, left-point sums.
ItoFormulaPaths ito_formula_apply(const Field& g, const Field& g_t, const Field& g_x, const Field& g_xx,
                                  const ItoProcess& X);

}  // namespace fbmcalc
