#include "fbmcalc/gaussian_paths.hpp"

#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <complex>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace fbmcalc {

void GridSpec::validate() const {
  if (n_steps < 1) throw std::invalid_argument("GridSpec: n_steps must be >= 1");
  if (!std::isfinite(t_max) || !(t_max > 0)) throw std::invalid_argument("GridSpec: t_max must be finite and > 0");
}

Eigen::VectorXd GridSpec::times() const {
  Eigen::VectorXd t(n_steps + 1);
  for (Eigen::Index k = 0; k <= n_steps; ++k) t[k] = time(k);
  return t;
}

namespace {

constexpr std::array<std::pair<Generator, std::string_view>, 6> kGeneratorNames{{
    {Generator::BmIncrements, "bm-increments"},
    {Generator::FbmCholesky, "fbm-cholesky"},
    {Generator::FbmMovingAverage, "fbm-moving-average"},
    {Generator::FbmCirculant, "fbm-circulant"},
    {Generator::Transformed, "transformed"},
    {Generator::Imported, "imported"},
}};

}  // namespace

std::string_view to_string(Generator g) {
  for (const auto& [id, name] : kGeneratorNames)
    if (id == g) return name;
  return "unknown";
}

Generator generator_from_string(std::string_view name) {
  for (const auto& [id, n] : kGeneratorNames)
    if (n == name) return id;
  throw std::invalid_argument("unknown generator '" + std::string(name) + "'");
}

SamplePath SamplePath::on_grid(const GridSpec& grid, Eigen::VectorXd values, double hurst, Generator generator,
                               RngSeed seed) {
  grid.validate();
  SamplePath p;
  p.grid = grid;
  p.times = grid.times();
  p.values = std::move(values);
  p.hurst = hurst;
  p.seed = seed;
  p.generator = generator;
  p.validate();
  return p;
}

bool SamplePath::uniform() const {
  if (times.size() != grid.n_steps + 1) return false;
  for (Eigen::Index k = 0; k < times.size(); ++k)
    if (times[k] != grid.time(k)) return false;
  return true;
}

void SamplePath::validate() const {
  if (values.size() < 2) throw std::invalid_argument("SamplePath: need at least 2 nodes");
  if (times.size() != values.size()) throw std::invalid_argument("SamplePath: times/values length mismatch");
  if (values[0] != 0.0) throw std::invalid_argument("SamplePath: path must start at 0");
  if (!values.allFinite() || !times.allFinite()) throw std::invalid_argument("SamplePath: non-finite entry");
  for (Eigen::Index k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("SamplePath: times must increase");
  check_hurst(hurst);
}

GridFunction SamplePath::as_grid_function() const {
  if (!uniform()) throw std::invalid_argument("as_grid_function: path is not on a uniform grid");
  return GridFunction(0.0, grid.t_max, values);
}

SamplePath generate_bm(const GridSpec& grid, RngSeed seed) {
  grid.validate();
  NormalStream normals(seed);
  const double sd = std::sqrt(grid.dt());
  Eigen::VectorXd v(grid.n_steps + 1);
  v[0] = 0.0;
  for (Eigen::Index k = 0; k < grid.n_steps; ++k) v[k + 1] = v[k] + sd * normals.next();
  return SamplePath::on_grid(grid, std::move(v), 0.5, Generator::BmIncrements, seed);
}

FbmCholesky::FbmCholesky(const GridSpec& grid, double hurst, CholeskyOptions options)
    : grid_(grid), hurst_(hurst) {
  grid.validate();
  check_hurst(hurst);
  if (grid.n_steps > options.max_steps)
    throw std::invalid_argument("FbmCholesky: n_steps " + std::to_string(grid.n_steps) + " exceeds cap " +
                                std::to_string(options.max_steps));
  const Eigen::VectorXd t = grid.times().tail(grid.n_steps);
  Eigen::MatrixXd cov = fbm_covariance_matrix(hurst, t);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    jitter_ = 1e-12 * cov.diagonal().maxCoeff();
    cov.diagonal().array() += jitter_;
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw FactorizationError("FbmCholesky: covariance not positive definite even with jitter");
  }
  factor_ = llt.matrixL();
}

SamplePath FbmCholesky::sample(RngSeed seed) const {
  NormalStream normals(seed);
  const Eigen::VectorXd z = normals.take(grid_.n_steps);
  Eigen::VectorXd v(grid_.n_steps + 1);
  v[0] = 0.0;
  v.tail(grid_.n_steps).noalias() = factor_.triangularView<Eigen::Lower>() * z;
  return SamplePath::on_grid(grid_, std::move(v), hurst_, Generator::FbmCholesky, seed);
}

SamplePath generate_fbm_cholesky(const GridSpec& grid, double hurst, RngSeed seed) {
  static std::mutex mutex;
  static std::shared_ptr<const FbmCholesky> cached;
  static GridSpec cached_grid;
  static double cached_hurst = -1.0;
  std::shared_ptr<const FbmCholesky> gen;
  {
    std::lock_guard lock(mutex);
    if (!cached || !(cached_grid == grid) || cached_hurst != hurst) {
      cached = std::make_shared<const FbmCholesky>(grid, hurst);
      cached_grid = grid;
      cached_hurst = hurst;
    }
    gen = cached;
  }
  return gen->sample(seed);
}

double normalizing_constant(double hurst) {
  check_hurst(hurst);
  const double d = hurst - 0.5;
  if (d == 0.0) return 1.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  // [0, 1] directly; [1, inf) through x = 1/y, where
  // [(1+1/y)^d - y^-d]^2 y^-2 = y^(-2d-2) [(1+y)^d - 1]^2.
  auto near = [d](double x) {
    if (x == 0.0) return 0.0;  // integrable endpoint singularity
    const double v = std::pow(1.0 + x, d) - std::pow(x, d);
    return v * v;
  };
  auto far = [d](double y) {
    if (y == 0.0) return 0.0;
    const double v = std::expm1(d * std::log1p(y)) / y;
    return std::pow(y, -2.0 * d) * v * v;
  };
  const double tail = ts.integrate(near, 0.0, 1.0, 1e-14) + ts.integrate(far, 0.0, 1.0, 1e-14);
  return std::sqrt(tail + 1.0 / (2.0 * hurst));
}

namespace {

// Integral of x^d over [lo, hi], 0 <= lo < hi.
double power_cell(double lo, double hi, double d) {
  const double e = d + 1.0;
  return (std::pow(hi, e) - std::pow(lo, e)) / e;
}

}  // namespace

FbmMovingAverage::FbmMovingAverage(const GridSpec& grid, double hurst, MovingAverageOptions options)
    : grid_(grid), hurst_(hurst) {
  grid.validate();
  check_hurst(hurst);
  truncation_ = options.truncation > 0.0 ? options.truncation : 50.0 * grid.t_max;
  if (truncation_ < grid.t_max) throw std::invalid_argument("FbmMovingAverage: truncation L must be >= t_max");
  if (options.kernel_mesh < 1) throw std::invalid_argument("FbmMovingAverage: kernel_mesh must be >= 1");
  if (!(options.growth >= 1.0)) throw std::invalid_argument("FbmMovingAverage: growth must be >= 1");

  const Eigen::Index per_step = std::max<Eigen::Index>(1, (options.kernel_mesh + grid.n_steps - 1) / grid.n_steps);
  const double h = grid.dt() / static_cast<double>(per_step);

  // Cell edges, increasing from -L to t_max.
  std::vector<double> back;  // edges below -t_max, built outward
  double edge = -grid.t_max;
  double width = h;
  while (edge > -truncation_) {
    width *= options.growth;
    edge = std::max(edge - width, -truncation_);
    back.push_back(edge);
  }
  std::vector<double> edges(back.rbegin(), back.rend());
  const Eigen::Index uniform_cells = 2 * grid.n_steps * per_step;
  for (Eigen::Index j = 0; j <= uniform_cells; ++j)
    edges.push_back(-grid.t_max + static_cast<double>(j) * h);
  edges.back() = grid.t_max;

  const Eigen::Index cells = static_cast<Eigen::Index>(edges.size()) - 1;
  const double d = hurst - 0.5;
  const double c = normalizing_constant(hurst);
  weights_.setZero(grid.n_steps, cells);
  for (Eigen::Index i = 0; i < grid.n_steps; ++i) {
    const double t = grid.time(i + 1);
    for (Eigen::Index j = 0; j < cells; ++j) {
      const double lo = edges[j];
      const double hi = std::min(edges[j + 1], t);
      if (!(hi > lo)) break;
      double integral = power_cell(t - hi, t - lo, d);
      if (hi <= 0.0) integral -= power_cell(-hi, -lo, d);
      weights_(i, j) = integral / (c * std::sqrt(edges[j + 1] - lo));
    }
  }
  if (!weights_.allFinite())
    throw std::domain_error("FbmMovingAverage: kernel weights overflowed; refine kernel_mesh or move H away from 0");
}

SamplePath FbmMovingAverage::sample(RngSeed seed) const {
  NormalStream normals(seed);
  const Eigen::VectorXd z = normals.take(weights_.cols());
  Eigen::VectorXd v(grid_.n_steps + 1);
  v[0] = 0.0;
  v.tail(grid_.n_steps).noalias() = weights_ * z;
  return SamplePath::on_grid(grid_, std::move(v), hurst_, Generator::FbmMovingAverage, seed);
}

double FbmMovingAverage::truncation_bias_bound() const {
  const double d = hurst_ - 0.5;
  const double c = normalizing_constant(hurst_);
  const double t = grid_.t_max;
  return d * d * t * t * std::pow(truncation_, 2.0 * d - 1.0) / ((1.0 - 2.0 * d) * c * c);
}

Eigen::VectorXd FbmMovingAverage::variance_deficit() const {
  Eigen::VectorXd out(grid_.n_steps);
  for (Eigen::Index i = 0; i < grid_.n_steps; ++i)
    out[i] = std::pow(grid_.time(i + 1), 2.0 * hurst_) - weights_.row(i).squaredNorm();
  return out;
}

SamplePath generate_fbm_moving_average(const GridSpec& grid, double hurst, RngSeed seed, double truncation,
                                       Eigen::Index kernel_mesh) {
  MovingAverageOptions options;
  options.truncation = truncation;
  options.kernel_mesh = kernel_mesh;
  return FbmMovingAverage(grid, hurst, options).sample(seed);
}

FbmCirculant::FbmCirculant(const GridSpec& grid, double hurst) : grid_(grid), hurst_(hurst) {
  grid.validate();
  check_hurst(hurst);
  const Eigen::Index n = grid.n_steps;
  const Eigen::Index m = 2 * n;
  std::vector<double> row(m);
  for (Eigen::Index k = 0; k <= n; ++k) row[k] = fgn_autocovariance(hurst, k);
  for (Eigen::Index k = n + 1; k < m; ++k) row[k] = row[m - k];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, row);
  eigen_.resize(m);
  sqrt_eigen_.resize(m);
  double largest = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) largest = std::max(largest, std::abs(spectrum[k].real()));
  for (Eigen::Index k = 0; k < m; ++k) {
    double lambda = spectrum[k].real();
    if (lambda < 0.0) {
      if (lambda < -1e-10 * largest) throw FactorizationError("FbmCirculant: embedding is not nonnegative definite");
      lambda = 0.0;
    }
    eigen_[k] = lambda;
    sqrt_eigen_[k] = std::sqrt(lambda / static_cast<double>(m));
  }
}

SamplePath FbmCirculant::sample(RngSeed seed) const {
  const Eigen::Index m = sqrt_eigen_.size();
  const Eigen::Index n = grid_.n_steps;
  NormalStream normals(seed);
  std::vector<std::complex<double>> w(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double re = normals.next();
    const double im = normals.next();
    w[k] = sqrt_eigen_[k] * std::complex<double>(re, im);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> y;
  fft.fwd(y, w);
  const double scale = std::pow(grid_.dt(), hurst_);
  Eigen::VectorXd v(n + 1);
  v[0] = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) v[k + 1] = v[k] + scale * y[k].real();
  return SamplePath::on_grid(grid_, std::move(v), hurst_, Generator::FbmCirculant, seed);
}

SamplePath generate_fbm_circulant(const GridSpec& grid, double hurst, RngSeed seed) {
  return FbmCirculant(grid, hurst).sample(seed);
}

SamplePath scale_path(const SamplePath& path, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("scale_path: a must be finite and > 0");
  SamplePath out = path;
  out.grid.t_max = path.grid.t_max / a;
  out.times = path.times / a;
  out.values = path.values * std::pow(a, -path.hurst);
  out.generator = Generator::Transformed;
  return out;
}

SamplePath time_invert_bm(const SamplePath& path) {
  if (path.hurst != 0.5) throw std::invalid_argument("time_invert_bm: input must be a Brownian path (H = 1/2)");
  path.validate();
  if (path.times[0] != 0.0) throw std::invalid_argument("time_invert_bm: path must start at t = 0");
  const Eigen::Index n = path.steps();
  SamplePath out;
  out.hurst = 0.5;
  out.seed = path.seed;
  out.generator = Generator::Transformed;
  out.times.resize(n + 1);
  out.values.resize(n + 1);
  out.times[0] = 0.0;
  out.values[0] = 0.0;
  for (Eigen::Index j = 1; j <= n; ++j) {
    const Eigen::Index k = n + 1 - j;
    const double s = 1.0 / path.times[k];
    out.times[j] = s;
    out.values[j] = s * path.values[k];
  }
  out.grid = GridSpec{out.times[n], n};
  out.validate();
  return out;
}

}  // namespace fbmcalc
