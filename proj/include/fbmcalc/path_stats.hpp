#pragma once

#include "fbmcalc/gaussian_paths.hpp"

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fbmcalc {

enum class VariationVerdict { ConvergesToZero, Stabilizes, Diverges };
std::string_view to_string(VariationVerdict v);

/// Sums of |increment|^p over dyadic coarsenings of a path's grid.
struct VariationEstimate {
  double p = 2.0;
  std::vector<std::pair<double, double>> mesh_levels;  // (mesh, v_p), mesh strictly decreasing
  double slope = 0.0;                                  // least-squares slope of log v_p vs log mesh
  VariationVerdict verdict = VariationVerdict::Stabilizes;
};

enum class HurstMethod { RescaledRange, VariationIndex, HolderSup };
std::string_view to_string(HurstMethod m);

struct HurstEstimate {
  double h_hat = 0.0;
  HurstMethod method = HurstMethod::RescaledRange;
  double std_error = 0.0;
  std::vector<std::pair<double, double>> block_data;  // (block size or lag, statistic)
  bool in_model = true;                               // false when h_hat falls outside (0, 1)
};

/// Slope thresholds for the p-variation verdict.
struct VariationThresholds {
  double converges = 0.2;  // slope above: v_p -> 0 as the mesh shrinks
  double diverges = -0.2;  // slope below: v_p -> infinity
};

/// Sum of squared increments over the path's own grid.
double quadratic_variation(const SamplePath& path);

/// v_p at coarsening levels 0..levels-1 (every 2^l-th node), verdict from the
/// log-log slope against mesh.  The dyadic sums are lower bounds of the true
/// p-variation supremum; only their scaling is used.
VariationEstimate p_variation(const SamplePath& path, double p, int levels,
                              VariationThresholds thresholds = {});

/// Hurst estimate 1/p*, where p* is the root of the p-variation slope in p,
/// located by bisection on [1, 20].  std_error is the final bracket width in H.
/// Needs at least 2^10 steps; throws std::domain_error if the slope has no sign
/// change on the bracket.
HurstEstimate variation_index(const SamplePath& path);

/// Classical rescaled-range estimate from a series of increments.  Block sizes
/// are powers of two from 16 to length/8; each block contributes
/// R/S = (range of mean-adjusted partial sums) / (population standard deviation).
/// h_hat is the least-squares slope of log mean(R/S) against log block size.
HurstEstimate rescaled_range_hurst(const Eigen::VectorXd& series);

/// Hölder exponent from the scaling of max_k |X(t_k + delta) - X(t_k)| over
/// dyadic lags delta = 2^j dt up to t_max/16.
HurstEstimate holder_exponent(const SamplePath& path);

/// Increment autocovariance of unit-spaced fBm: 1 at n = 0, else
/// ((n+1)^2H - 2 n^2H + (n-1)^2H) / 2.
template <typename Scalar>
Scalar theoretical_acf(Scalar H, long long n) {
  if (n < 0) throw std::invalid_argument("theoretical_acf: negative lag");
  return fgn_autocovariance(H, n);
}

/// Sample autocorrelations of the path increments at lags 0..max_lag.
/// Increment correlations of fBm do not depend on the grid spacing, so any
/// uniform grid serves.  Requires max_lag < (number of increments) / 4.
Eigen::VectorXd empirical_acf(const SamplePath& path, Eigen::Index max_lag);
Eigen::VectorXd empirical_acf(const Eigen::VectorXd& increments, Eigen::Index max_lag);

enum class DependenceClass { ShortRange, Indeterminate, LongRange };
std::string_view to_string(DependenceClass c);

struct LrdDiagnostic {
  Eigen::VectorXd partial_sums;     // sum_{n <= k} |r_H(n)|, k = 1..N
  Eigen::VectorXd asymptote_ratio;  // r_H(n) / (H(2H-1) n^(2H-2)), n = 1..N
};

/// Requires 0 < H < 1, H != 1/2.
LrdDiagnostic lrd_diagnostic(double hurst, Eigen::Index N);

/// (S(N) - S(N/10)) / S(N/10) for S(k) = sum_{n <= k} |r_H(n)|, computed
/// without storing the sequence.
double partial_sum_growth(double hurst, long long N);

/// growth > 1%: LongRange; growth < 0.1%: ShortRange; otherwise Indeterminate.
DependenceClass classify_dependence(double last_decade_growth);

/// max_k |dX_k| / dt at the path grid and its dyadic coarsenings, finest first.
std::vector<double> max_difference_quotients(const SamplePath& path, int levels);

}  // namespace fbmcalc
