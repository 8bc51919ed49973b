#pragma once

// Brownian and fractional Brownian sample paths.
//
// All generators are pure functions of (grid, H, seed): the same inputs give
// bitwise-identical paths, and ensembles use the replicate index as the
// random stream.

#include "fbmcalc/errors.hpp"
#include "fbmcalc/grid_function.hpp"
#include "fbmcalc/rng.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string_view>

namespace fbmcalc {

/// Closed uniform grid t_k = k * t_max / n_steps, k = 0..n_steps.
struct GridSpec {
  double t_max = 1.0;
  Eigen::Index n_steps = 1;

  void validate() const;
  double dt() const { return t_max / static_cast<double>(n_steps); }
  double time(Eigen::Index k) const { return k == n_steps ? t_max : static_cast<double>(k) * dt(); }
  Eigen::VectorXd times() const;

  bool operator==(const GridSpec&) const = default;
};

enum class Generator { BmIncrements, FbmCholesky, FbmMovingAverage, FbmCirculant, Transformed, Imported };

std::string_view to_string(Generator g);
/// Throws std::invalid_argument for unknown names.
Generator generator_from_string(std::string_view name);

/// A path sampled at explicit node times.  Generated paths live on the
/// uniform grid `grid`; transformed paths (time inversion) may carry
/// nonuniform times, in which case `grid` only records the extent and count.
struct SamplePath {
  GridSpec grid;
  Eigen::VectorXd times;
  Eigen::VectorXd values;
  double hurst = 0.5;
  RngSeed seed;
  Generator generator = Generator::Imported;

  static SamplePath on_grid(const GridSpec& grid, Eigen::VectorXd values, double hurst, Generator generator,
                            RngSeed seed = {});

  Eigen::Index steps() const { return values.size() - 1; }
  double t_max() const { return times[times.size() - 1]; }
  bool uniform() const;
  /// Checks values[0] = 0, matching lengths, finiteness, increasing times.
  void validate() const;
  /// Values as a GridFunction on [0, t_max] (uniform paths only).
  GridFunction as_grid_function() const;
};

template <typename Scalar>
Scalar bm_covariance(Scalar s, Scalar t) {
  if (s < Scalar(0) || t < Scalar(0)) throw std::invalid_argument("bm_covariance: negative time");
  return s < t ? s : t;
}

template <typename Scalar>
void check_hurst(Scalar H) {
  if (!(H > Scalar(0) && H < Scalar(1))) throw std::invalid_argument("Hurst index must lie in (0, 1)");
}

/// R_H(s, t) = (t^2H + s^2H - |t-s|^2H) / 2.
template <typename Scalar>
Scalar fbm_covariance(Scalar H, Scalar s, Scalar t) {
  using std::abs;
  using std::pow;
  check_hurst(H);
  if (s < Scalar(0) || t < Scalar(0)) throw std::invalid_argument("fbm_covariance: negative time");
  const Scalar e = Scalar(2) * H;
  return (pow(t, e) + pow(s, e) - pow(abs(t - s), e)) / Scalar(2);
}

/// Cov(B(t) - B(s), B(v) - B(u)) = (|t-u|^2H + |s-v|^2H - |s-u|^2H - |t-v|^2H) / 2,
/// i.e. the covariance of the increments over [s,t] and [u,v].
template <typename Scalar>
Scalar increment_cross_covariance(Scalar H, Scalar s, Scalar t, Scalar u, Scalar v) {
  using std::abs;
  using std::pow;
  check_hurst(H);
  if (s < Scalar(0) || t < Scalar(0) || u < Scalar(0) || v < Scalar(0))
    throw std::invalid_argument("increment_cross_covariance: negative time");
  const Scalar e = Scalar(2) * H;
  return (pow(abs(t - u), e) + pow(abs(s - v), e) - pow(abs(s - u), e) - pow(abs(t - v), e)) / Scalar(2);
}

/// Autocovariance of unit-spaced fBm increments,
/// ((k+1)^2H - 2k^2H + (k-1)^2H) / 2, evaluated as
/// k^2H [expm1(2H log1p(1/k)) + expm1(2H log1p(-1/k))] / 2 to avoid cancellation.
template <typename Scalar>
Scalar fgn_autocovariance(Scalar H, long long k) {
  using std::expm1;
  using std::log1p;
  using std::pow;
  check_hurst(H);
  if (k < 0) k = -k;
  if (k == 0) return Scalar(1);
  const Scalar e = Scalar(2) * H;
  const Scalar x = Scalar(1) / Scalar(k);
  return pow(Scalar(k), e) * (expm1(e * log1p(x)) + expm1(e * log1p(-x))) / Scalar(2);
}

/// [R_H(t_i, t_j)] for the given times.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> fbm_covariance_matrix(
    Scalar H, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& times) {
  const Eigen::Index n = times.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i) c(i, j) = c(j, i) = fbm_covariance(H, times[i], times[j]);
  return c;
}

/// Cumulative sum of i.i.d. N(0, dt) increments.
SamplePath generate_bm(const GridSpec& grid, RngSeed seed);

struct CholeskyOptions {
  Eigen::Index max_steps = 4096;  // O(n^3) factorization cap
};

/// Exact fBm on a grid: lower Cholesky factor of [R_H(t_i, t_j)], i, j >= 1,
/// applied to standard normals.  If the factorization fails, one retry with
/// diagonal jitter 1e-12 * max diagonal is made before FactorizationError.
class FbmCholesky {
 public:
  FbmCholesky(const GridSpec& grid, double hurst, CholeskyOptions options = {});

  SamplePath sample(RngSeed seed) const;
  const Eigen::MatrixXd& factor() const { return factor_; }
  double jitter() const { return jitter_; }

 private:
  GridSpec grid_;
  double hurst_;
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
};

/// One-shot Cholesky sample; the factor for the most recent (grid, H) is cached.
SamplePath generate_fbm_cholesky(const GridSpec& grid, double hurst, RngSeed seed);

/// C(H) = ( int_0^inf [(1+x)^(H-1/2) - x^(H-1/2)]^2 dx + 1/(2H) )^(1/2).
double normalizing_constant(double hurst);

struct MovingAverageOptions {
  double truncation = 0.0;       // L; 0 selects 50 * t_max
  Eigen::Index kernel_mesh = 1024;  // auxiliary cells per unit t_max on [-t_max, t_max]
  double growth = 1.05;          // cell growth ratio on [-L, -t_max]
};

/// Z(t) = (1/C(H)) int_{-L}^t [(t-s)_+^(H-1/2) - (-s)_+^(H-1/2)] dB(s).
///
/// The auxiliary Brownian motion lives on a mesh that is uniform on
/// [-t_max, t_max] (aligned with the path grid) and geometrically graded on
/// [-L, -t_max].  Each cell contributes (cell integral of the kernel) / sqrt(width)
/// times one standard normal, so the kernel singularity never needs to be evaluated.
class FbmMovingAverage {
 public:
  FbmMovingAverage(const GridSpec& grid, double hurst, MovingAverageOptions options = {});

  SamplePath sample(RngSeed seed) const;
  /// Rows: path nodes t_1..t_n; columns: auxiliary cells.
  const Eigen::MatrixXd& weights() const { return weights_; }
  double truncation() const { return truncation_; }
  /// Analytic bound on the variance lost by cutting the integral at -L, at t_max:
  /// d^2 t^2 L^(2d-1) / ((1-2d) C(H)^2), d = H - 1/2.
  double truncation_bias_bound() const;
  /// t_k^2H minus the variance actually realized, per node t_1..t_n.
  Eigen::VectorXd variance_deficit() const;

 private:
  GridSpec grid_;
  double hurst_;
  double truncation_;
  Eigen::MatrixXd weights_;
};

SamplePath generate_fbm_moving_average(const GridSpec& grid, double hurst, RngSeed seed, double truncation,
                                       Eigen::Index kernel_mesh);

/// Exact fBm by circulant embedding of the increment covariance (Davies-Harte),
/// O(n log n) per path.  Used for long paths where Cholesky is too costly.
class FbmCirculant {
 public:
  FbmCirculant(const GridSpec& grid, double hurst);

  SamplePath sample(RngSeed seed) const;
  /// Embedding eigenvalues (all >= 0 after clamping of rounding noise).
  const Eigen::VectorXd& eigenvalues() const { return eigen_; }

 private:
  GridSpec grid_;
  double hurst_;
  Eigen::VectorXd eigen_;
  Eigen::VectorXd sqrt_eigen_;  // sqrt(lambda_k / M)
};

SamplePath generate_fbm_circulant(const GridSpec& grid, double hurst, RngSeed seed);

/// t -> a^-H X(a t): times divided by a, values scaled by a^-H.
SamplePath scale_path(const SamplePath& path, double a);

/// X(s) = s B(1/s) at the reciprocal times s = 1/t_k (k >= 1), with X(0) = 0.
/// The result has nonuniform times.
SamplePath time_invert_bm(const SamplePath& path);

}  // namespace fbmcalc
