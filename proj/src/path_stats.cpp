#include "fbmcalc/path_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fbmcalc {

std::string_view to_string(VariationVerdict v) {
  switch (v) {
    case VariationVerdict::ConvergesToZero: return "converges-to-zero";
    case VariationVerdict::Stabilizes: return "stabilizes";
    case VariationVerdict::Diverges: return "diverges";
  }
  return "unknown";
}

std::string_view to_string(HurstMethod m) {
  switch (m) {
    case HurstMethod::RescaledRange: return "rescaled-range";
    case HurstMethod::VariationIndex: return "variation-index";
    case HurstMethod::HolderSup: return "holder-sup";
  }
  return "unknown";
}

std::string_view to_string(DependenceClass c) {
  switch (c) {
    case DependenceClass::ShortRange: return "short-range";
    case DependenceClass::Indeterminate: return "indeterminate";
    case DependenceClass::LongRange: return "long-range";
  }
  return "unknown";
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("least_squares: need at least 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

double p_sum(const SamplePath& path, double p, Eigen::Index stride, double& mesh) {
  double sum = 0.0;
  mesh = 0.0;
  const Eigen::Index n = path.steps();
  Eigen::Index prev = 0;
  for (Eigen::Index k = stride; k <= n; k += stride) {
    sum += std::pow(std::abs(path.values[k] - path.values[prev]), p);
    mesh = std::max(mesh, path.times[k] - path.times[prev]);
    prev = k;
  }
  return sum;
}

}  // namespace

double quadratic_variation(const SamplePath& path) {
  if (path.values.size() < 2) throw std::invalid_argument("quadratic_variation: need at least 2 nodes");
  double qv = 0.0;
  for (Eigen::Index k = 1; k < path.values.size(); ++k) {
    const double d = path.values[k] - path.values[k - 1];
    qv += d * d;
  }
  return qv;
}

VariationEstimate p_variation(const SamplePath& path, double p, int levels, VariationThresholds thresholds) {
  if (!(p > 0.0)) throw std::invalid_argument("p_variation: p must be > 0");
  if (levels < 3) throw std::invalid_argument("p_variation: need at least 3 levels");
  if ((path.steps() >> (levels - 1)) < 1)
    throw std::invalid_argument("p_variation: path too short for " + std::to_string(levels) + " levels");
  VariationEstimate est;
  est.p = p;
  std::vector<double> lx, ly;
  for (int l = levels - 1; l >= 0; --l) {
    double mesh = 0.0;
    const double v = p_sum(path, p, Eigen::Index{1} << l, mesh);
    est.mesh_levels.emplace_back(mesh, v);
    lx.push_back(std::log(mesh));
    ly.push_back(std::log(v));
  }
  for (double y : ly)
    if (!std::isfinite(y)) {
      // A level with v_p = 0 (constant path) has no scaling to fit.
      est.slope = 0.0;
      est.verdict = VariationVerdict::ConvergesToZero;
      return est;
    }
  est.slope = least_squares(lx, ly).slope;
  if (est.slope > thresholds.converges)
    est.verdict = VariationVerdict::ConvergesToZero;
  else if (est.slope < thresholds.diverges)
    est.verdict = VariationVerdict::Diverges;
  else
    est.verdict = VariationVerdict::Stabilizes;
  return est;
}

HurstEstimate variation_index(const SamplePath& path) {
  const Eigen::Index n = path.steps();
  if (n < 1024) throw std::invalid_argument("variation_index: need at least 2^10 steps");
  // Coarsest level keeps at least 64 increments.
  int levels = 1;
  while ((n >> levels) >= 64) ++levels;
  auto slope = [&](double p) { return p_variation(path, p, levels).slope; };

  double lo = 1.0, hi = 20.0;
  double s_lo = slope(lo), s_hi = slope(hi);
  if (!(s_lo < 0.0 && s_hi > 0.0))
    throw std::domain_error("variation_index: p-variation slope has no sign change on [1, 20]");
  HurstEstimate est;
  est.method = HurstMethod::VariationIndex;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    const double s = slope(mid);
    est.block_data.emplace_back(mid, s);
    if (s < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  std::sort(est.block_data.begin(), est.block_data.end());
  const double p_star = 0.5 * (lo + hi);
  est.h_hat = 1.0 / p_star;
  est.std_error = 0.5 * (1.0 / lo - 1.0 / hi);
  est.in_model = est.h_hat > 0.0 && est.h_hat < 1.0;
  return est;
}

HurstEstimate rescaled_range_hurst(const Eigen::VectorXd& series) {
  const Eigen::Index len = series.size();
  if (len < 256) throw std::invalid_argument("rescaled_range_hurst: need at least 256 samples");
  if (!series.allFinite()) throw std::invalid_argument("rescaled_range_hurst: non-finite sample");
  HurstEstimate est;
  est.method = HurstMethod::RescaledRange;
  std::vector<double> lx, ly;
  for (Eigen::Index size = 16; size <= len / 8; size *= 2) {
    double total = 0.0;
    Eigen::Index used = 0;
    for (Eigen::Index start = 0; start + size <= len; start += size) {
      const auto block = series.segment(start, size);
      const double mean = block.mean();
      double partial = 0.0, top = 0.0, bottom = 0.0, ss = 0.0;
      for (Eigen::Index i = 0; i < size; ++i) {
        const double dev = block[i] - mean;
        partial += dev;
        top = std::max(top, partial);
        bottom = std::min(bottom, partial);
        ss += dev * dev;
      }
      const double s = std::sqrt(ss / static_cast<double>(size));
      if (s == 0.0) continue;
      total += (top - bottom) / s;
      ++used;
    }
    if (used == 0) continue;
    const double rs = total / static_cast<double>(used);
    est.block_data.emplace_back(static_cast<double>(size), rs);
    lx.push_back(std::log(static_cast<double>(size)));
    ly.push_back(std::log(rs));
  }
  if (lx.size() < 2) throw std::domain_error("rescaled_range_hurst: series is constant (S = 0 in every block)");
  const LineFit fit = least_squares(lx, ly);
  est.h_hat = fit.slope;
  est.std_error = fit.slope_se;
  est.in_model = est.h_hat > 0.0 && est.h_hat < 1.0;
  return est;
}

HurstEstimate holder_exponent(const SamplePath& path) {
  const Eigen::Index n = path.steps();
  if (n < 1024) throw std::invalid_argument("holder_exponent: need at least 2^10 steps");
  if (!path.uniform()) throw std::invalid_argument("holder_exponent: path must be on a uniform grid");
  HurstEstimate est;
  est.method = HurstMethod::HolderSup;
  std::vector<double> lx, ly;
  for (Eigen::Index lag = 1; lag <= n / 16; lag *= 2) {
    const Eigen::VectorXd diff = path.values.tail(n + 1 - lag) - path.values.head(n + 1 - lag);
    const double m = diff.cwiseAbs().maxCoeff();
    if (m == 0.0) throw std::domain_error("holder_exponent: path is constant");
    const double delta = static_cast<double>(lag) * path.grid.dt();
    est.block_data.emplace_back(delta, m);
    lx.push_back(std::log(delta));
    ly.push_back(std::log(m));
  }
  const LineFit fit = least_squares(lx, ly);
  est.h_hat = fit.slope;
  est.std_error = fit.slope_se;
  est.in_model = est.h_hat > 0.0 && est.h_hat < 1.0 - 1e-9;
  return est;
}

Eigen::VectorXd empirical_acf(const Eigen::VectorXd& x, Eigen::Index max_lag) {
  const Eigen::Index n = x.size();
  if (max_lag < 0) throw std::invalid_argument("empirical_acf: negative lag");
  if (4 * max_lag >= n) throw std::invalid_argument("empirical_acf: need max_lag < length/4");
  const Eigen::VectorXd c = x.array() - x.mean();
  const double denom = c.squaredNorm();
  if (denom == 0.0) throw std::domain_error("empirical_acf: constant series");
  Eigen::VectorXd r(max_lag + 1);
  r[0] = 1.0;
  for (Eigen::Index k = 1; k <= max_lag; ++k) r[k] = c.head(n - k).dot(c.tail(n - k)) / denom;
  return r;
}

Eigen::VectorXd empirical_acf(const SamplePath& path, Eigen::Index max_lag) {
  if (!path.uniform()) throw std::invalid_argument("empirical_acf: path must be on a uniform grid");
  const Eigen::Index n = path.steps();
  return empirical_acf(Eigen::VectorXd(path.values.tail(n) - path.values.head(n)), max_lag);
}

LrdDiagnostic lrd_diagnostic(double hurst, Eigen::Index N) {
  check_hurst(hurst);
  if (hurst == 0.5) throw std::invalid_argument("lrd_diagnostic: H = 1/2 has no dependence to diagnose");
  if (N < 1) throw std::invalid_argument("lrd_diagnostic: N must be >= 1");
  LrdDiagnostic out;
  out.partial_sums.resize(N);
  out.asymptote_ratio.resize(N);
  const double lead = hurst * (2.0 * hurst - 1.0);
  double sum = 0.0;
  for (Eigen::Index n = 1; n <= N; ++n) {
    const double r = theoretical_acf(hurst, n);
    sum += std::abs(r);
    out.partial_sums[n - 1] = sum;
    out.asymptote_ratio[n - 1] = r / (lead * std::pow(static_cast<double>(n), 2.0 * hurst - 2.0));
  }
  return out;
}

double partial_sum_growth(double hurst, long long N) {
  check_hurst(hurst);
  if (N < 10) throw std::invalid_argument("partial_sum_growth: N must be >= 10");
  const long long decade = N / 10;
  // Summed smallest-first within each range to keep the tail visible.
  double head = 0.0;
  for (long long n = decade; n >= 1; --n) head += std::abs(theoretical_acf(hurst, n));
  double tail = 0.0;
  for (long long n = N; n > decade; --n) tail += std::abs(theoretical_acf(hurst, n));
  if (head == 0.0) return 0.0;
  return tail / head;
}

DependenceClass classify_dependence(double growth) {
  if (growth > 0.01) return DependenceClass::LongRange;
  if (growth < 0.001) return DependenceClass::ShortRange;
  return DependenceClass::Indeterminate;
}

std::vector<double> max_difference_quotients(const SamplePath& path, int levels) {
  if (levels < 1) throw std::invalid_argument("max_difference_quotients: levels must be >= 1");
  std::vector<double> out;
  for (int l = 0; l < levels; ++l) {
    const Eigen::Index stride = Eigen::Index{1} << l;
    if (stride > path.steps()) throw std::invalid_argument("max_difference_quotients: path too short");
    double best = 0.0;
    for (Eigen::Index k = stride; k <= path.steps(); k += stride)
      best = std::max(best, std::abs(path.values[k] - path.values[k - stride]) / (path.times[k] - path.times[k - stride]));
    out.push_back(best);
  }
  return out;
}

}  // namespace fbmcalc
