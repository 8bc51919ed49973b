#include "fbmcalc/fbm_integrate.hpp"

#include "fbmcalc/path_stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fbmcalc {

void EpsilonSchedule::validate(double h) const {
  if (values.size() < 3) throw std::invalid_argument("EpsilonSchedule: need at least 3 levels");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double e = values[i];
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("EpsilonSchedule: eps must be finite and > 0");
    if (i > 0 && !(e < values[i - 1])) throw std::invalid_argument("EpsilonSchedule: eps must strictly decrease");
    const double m = e / h;
    if (m < 1.0 - 1e-9) throw std::invalid_argument("EpsilonSchedule: eps below the grid spacing");
    if (std::abs(m - std::round(m)) > 1e-9 * m) throw std::invalid_argument("EpsilonSchedule: eps not a grid multiple");
  }
}

EpsilonSchedule EpsilonSchedule::grid_default(double h) { return {{32 * h, 16 * h, 8 * h, 4 * h, 2 * h}}; }

namespace {

enum class Kernel { Symmetric, Forward, Backward };

void check_shared_grid(const GridFunction& f, const SamplePath& g, const char* who) {
  if (!g.uniform()) throw std::invalid_argument(std::string(who) + ": path must be on a uniform grid");
  if (f.intervals() != g.steps() || f.a() != 0.0 || std::abs(f.b() - g.t_max()) > 1e-12 * g.t_max())
    throw std::invalid_argument(std::string(who) + ": integrand and path grids differ");
  if (f.weighted()) throw std::invalid_argument(std::string(who) + ": weighted integrand");
}

Eigen::Index eps_steps(double eps, double h) { return static_cast<Eigen::Index>(std::llround(eps / h)); }

// Trapezoid in s of f(s) * kernel(s) with the path clamped outside [0, T].
double regularized(const Eigen::VectorXd& f, const Eigen::VectorXd& g, Eigen::Index m, Kernel kind) {
  const Eigen::Index n = g.size() - 1;
  auto at = [&](Eigen::Index k) { return g[std::clamp<Eigen::Index>(k, 0, n)]; };
  double sum = 0.0;
  for (Eigen::Index k = 0; k <= n; ++k) {
    double q = 0.0;
    switch (kind) {
      case Kernel::Symmetric: q = 0.5 * (at(k + m) - at(k - m)); break;
      case Kernel::Forward: q = at(k + m) - g[k]; break;
      case Kernel::Backward: q = at(k - m) - g[k]; break;
    }
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    sum += w * f[k] * q;
  }
  return sum / static_cast<double>(m);
}

void finish(IntegralResult& r, ConvergencePolicy policy) {
  r.value = r.levels.back().second;
  r.tolerance = policy.tolerance;
  const double step = std::abs(r.levels.back().second - r.levels[r.levels.size() - 2].second);
  r.converged = std::isfinite(step) && step <= policy.tolerance;
  std::ostringstream os;
  os << "last Cauchy step " << step << (r.converged ? " <= " : " > ") << "tolerance " << policy.tolerance;
  if (!r.diagnostic.empty()) os << "; " << r.diagnostic;
  r.diagnostic = os.str();
}

IntegralResult epsilon_integral(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                ConvergencePolicy policy, Kernel kind, const char* who) {
  check_shared_grid(f, g, who);
  const double h = g.grid.dt();
  eps.validate(h);
  IntegralResult r;
  for (double e : eps.values) {
    const double v = regularized(f.values(), g.values, eps_steps(e, h), kind);
    if (!std::isfinite(v)) throw std::domain_error(std::string(who) + ": non-finite level value");
    r.levels.emplace_back(e, v);
  }
  finish(r, policy);
  return r;
}

}  // namespace

IntegralResult symmetric_integral(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                  ConvergencePolicy policy) {
  return epsilon_integral(f, g, eps, policy, Kernel::Symmetric, "symmetric_integral");
}

IntegralResult forward_integral(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                ConvergencePolicy policy) {
  return epsilon_integral(f, g, eps, policy, Kernel::Forward, "forward_integral");
}

IntegralResult backward_integral(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                 ConvergencePolicy policy) {
  return epsilon_integral(f, g, eps, policy, Kernel::Backward, "backward_integral");
}

IntegralResult covariation(const GridFunction& x, const SamplePath& y, const EpsilonSchedule& eps,
                           ConvergencePolicy policy) {
  check_shared_grid(x, y, "covariation");
  const double h = y.grid.dt();
  eps.validate(h);
  const Eigen::Index n = y.steps();
  const auto& xv = x.values();
  const auto& yv = y.values;
  IntegralResult r;
  for (double e : eps.values) {
    const Eigen::Index m = eps_steps(e, h);
    double sum = 0.0;
    for (Eigen::Index k = 0; k <= n; ++k) {
      const Eigen::Index j = std::min(k + m, n);
      const double w = (k == 0 || k == n) ? 0.5 : 1.0;
      sum += w * (xv[j] - xv[k]) * (yv[j] - yv[k]);
    }
    r.levels.emplace_back(e, sum * h / e);
  }
  finish(r, policy);
  return r;
}

IntegralResult covariation(const SamplePath& x, const SamplePath& y, const EpsilonSchedule& eps,
                           ConvergencePolicy policy) {
  return covariation(x.as_grid_function(), y, eps, policy);
}

double boundary_tolerance(const SamplePath& g, double eps) {
  const double h = g.grid.dt();
  const Eigen::Index m = std::min(eps_steps(eps, h), g.steps());
  const auto head = g.values.head(m + 1);
  const auto tail = g.values.tail(m + 1);
  return (head.maxCoeff() - head.minCoeff()) + (tail.maxCoeff() - tail.minCoeff());
}

double integration_by_parts_value(const GridFunction& f, const SamplePath& g) {
  check_shared_grid(f, g, "integration_by_parts_value");
  const auto& fv = f.values();
  const auto& gv = g.values;
  const Eigen::Index n = g.steps();
  double stieltjes = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) stieltjes += 0.5 * (gv[k] + gv[k + 1]) * (fv[k + 1] - fv[k]);
  return fv[n] * gv[n] - fv[0] * gv[0] - stieltjes;
}

namespace {

SamplePath as_path(const GridFunction& u) {
  GridSpec grid{u.b() - u.a(), u.intervals()};
  Eigen::VectorXd v = u.values().array() - u.values()[0];
  return SamplePath::on_grid(grid, std::move(v), 0.5, Generator::Imported);
}

std::string variation_warning(const GridFunction& u, const SamplePath& g) {
  if (u.intervals() < 1024 || g.steps() < 1024) return "variation check skipped (path shorter than 2^10 steps)";
  double p_u = 1.0;
  try {
    p_u = 1.0 / variation_index(as_path(u)).h_hat;
  } catch (const std::domain_error&) {
    // No crossing on [1, 20]: finite 1-variation, i.e. a smooth integrand.
  }
  double h_g = 0.0;
  try {
    h_g = variation_index(g).h_hat;
  } catch (const std::domain_error&) {
    return "variation check inconclusive for the integrator";
  }
  const double bound = h_g < 1.0 ? 1.0 / (1.0 - h_g) : INFINITY;
  std::ostringstream os;
  if (p_u < bound)
    os << "variation check ok: p_u=" << p_u << " < 1/(1-H)=" << bound;
  else
    os << "warning: variation check failed: p_u=" << p_u << " >= 1/(1-H)=" << bound
       << " (condition is sufficient, not necessary)";
  return os.str();
}

}  // namespace

IntegralResult riemann_stieltjes_integral(const GridFunction& u, const SamplePath& g, int levels,
                                          ConvergencePolicy policy) {
  check_shared_grid(u, g, "riemann_stieltjes_integral");
  if (levels < 3) throw std::invalid_argument("riemann_stieltjes_integral: need at least 3 levels");
  const Eigen::Index n = g.steps();
  const Eigen::Index coarsest = Eigen::Index{1} << (levels - 1);
  if (n % coarsest != 0) throw std::invalid_argument("riemann_stieltjes_integral: steps not divisible by 2^(levels-1)");
  IntegralResult r;
  r.diagnostic = variation_warning(u, g);
  const auto& uv = u.values();
  const auto& gv = g.values;
  for (int l = levels - 1; l >= 0; --l) {
    const Eigen::Index stride = Eigen::Index{1} << l;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < n; k += stride) sum += uv[k] * (gv[k + stride] - gv[k]);
    r.levels.emplace_back(static_cast<double>(stride) * g.grid.dt(), sum);
  }
  finish(r, policy);
  return r;
}

IntegralResult riemann_stieltjes_integral(const SamplePath& u, const SamplePath& g, int levels,
                                          ConvergencePolicy policy) {
  return riemann_stieltjes_integral(u.as_grid_function(), g, levels, policy);
}

RelationCheck symmetric_forward_relation_check(const GridFunction& f, const SamplePath& g, const EpsilonSchedule& eps,
                                               ConvergencePolicy policy) {
  const auto sym = symmetric_integral(f, g, eps, policy);
  const auto fwd = forward_integral(f, g, eps, policy);
  const auto cov = covariation(f, g, eps, policy);
  if (!sym.converged || !fwd.converged || !cov.converged)
    throw std::domain_error("symmetric_forward_relation_check: a component did not converge");
  RelationCheck r;
  r.symmetric = sym.value;
  r.forward = fwd.value;
  r.cov = cov.value;
  r.residual_half = sym.value - fwd.value - 0.5 * cov.value;
  r.residual_full = sym.value - fwd.value - cov.value;
  return r;
}

namespace {

std::vector<Eigen::Index> log_spaced_steps(Eigen::Index n, int count) {
  std::vector<Eigen::Index> m;
  for (int j = 0; j < count; ++j) {
    const double x = std::pow(static_cast<double>(n), static_cast<double>(j) / (count - 1));
    const Eigen::Index k = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::llround(x)), 1, n);
    if (m.empty() || k > m.back()) m.push_back(k);
  }
  if (m.back() != n) m.push_back(n);
  return m;
}

// Weights w_j with sum_j w_j J(u_j) = (1/Gamma(eps)) int_0^T u^(eps-1) J_lin(u) du.
std::vector<double> extended_weights(const std::vector<double>& u, double eps) {
  if (!(eps > 1e-300)) throw std::invalid_argument("extended_forward_integral: eps underflows");
  const double scale = eps / std::tgamma(1.0 + eps);  // 1/Gamma(eps)
  std::vector<double> w(u.size(), 0.0);
  w[0] = std::pow(u[0], eps) / eps;  // J held at J(u_0) on (0, u_0]
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    const double a = u[j], b = u[j + 1];
    const double A = std::pow(a, eps) * std::expm1(eps * std::log(b / a)) / eps;  // int u^(eps-1)
    const double B = (std::pow(b, eps + 1.0) - std::pow(a, eps + 1.0)) / (eps + 1.0);  // int u^eps
    w[j] += (b * A - B) / (b - a);
    w[j + 1] += (B - a * A) / (b - a);
  }
  for (double& x : w) {
    x *= scale;
    if (!std::isfinite(x)) throw std::domain_error("extended_forward_integral: u-weights overflow for this eps");
  }
  return w;
}

}  // namespace

double extended_forward_weight_sum(double t_max, Eigen::Index n_steps, double eps) {
  const double h = t_max / static_cast<double>(n_steps);
  std::vector<double> u;
  for (Eigen::Index m : log_spaced_steps(n_steps, 160)) u.push_back(static_cast<double>(m) * h);
  u.back() = t_max;
  double s = 0.0;
  for (double w : extended_weights(u, eps)) s += w;
  return s;
}

IntegralResult extended_forward_integral(const GridFunction& f, const SamplePath& g, int eps_levels,
                                         ConvergencePolicy policy) {
  check_shared_grid(f, g, "extended_forward_integral");
  if (eps_levels < 3) throw std::invalid_argument("extended_forward_integral: need at least 3 levels");
  const Eigen::Index n = g.steps();
  const double h = g.grid.dt();
  const auto steps = log_spaced_steps(n, 160);
  std::vector<double> u, J;
  for (Eigen::Index m : steps) {
    u.push_back(static_cast<double>(m) * h);
    J.push_back(regularized(f.values(), g.values, m, Kernel::Forward));
  }
  u.back() = g.t_max();
  IntegralResult r;
  for (int k = 0; k < eps_levels; ++k) {
    const double eps = 0.01 / std::pow(2.0, k);
    const auto w = extended_weights(u, eps);
    double v = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) v += w[j] * J[j];
    r.levels.emplace_back(eps, v);
  }
  finish(r, policy);
  return r;
}

FractionalForwardProcess fractional_forward_process(double x0, const GridFunction& alpha, const GridFunction& f,
                                                    const SamplePath& g) {
  check_shared_grid(alpha, g, "fractional_forward_process");
  check_shared_grid(f, g, "fractional_forward_process");
  FractionalForwardProcess X;
  X.x0 = x0;
  X.drift = alpha.values();
  X.diffusion = f.values();
  X.driver = g;
  const Eigen::Index n = g.steps();
  const double h = g.grid.dt();
  X.values.resize(n + 1);
  X.values[0] = x0;
  for (Eigen::Index k = 0; k < n; ++k)
    X.values[k + 1] = X.values[k] + X.drift[k] * h + X.diffusion[k] * (g.values[k + 1] - g.values[k]);
  if (!X.values.allFinite()) throw std::domain_error("fractional_forward_process: non-finite accumulation");
  return X;
}

FbmItoCheck fbm_ito_formula_check(const Field& g, const Field& g_t, const Field& g_x,
                                  const FractionalForwardProcess& X) {
  if (!(X.driver.hurst > 0.5))
    throw std::invalid_argument("fbm_ito_formula_check: requires H > 1/2 (zero quadratic variation)");
  const Eigen::Index n = X.driver.steps();
  const auto& t = X.driver.times;
  const auto& x = X.values;
  FbmItoCheck out;
  out.lhs.resize(n + 1);
  out.rhs.resize(n + 1);
  out.lhs[0] = out.rhs[0] = 0.0;
  const double g0 = g(t[0], x[0]);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double gt = g_t(t[k], x[k]), gx = g_x(t[k], x[k]);
    if (!std::isfinite(gt) || !std::isfinite(gx))
      throw std::domain_error("fbm_ito_formula_check: non-finite derivative");
    out.rhs[k + 1] = out.rhs[k] + gt * (t[k + 1] - t[k]) + gx * (x[k + 1] - x[k]);
    out.lhs[k + 1] = g(t[k + 1], x[k + 1]) - g0;
  }
  out.max_gap = (out.lhs - out.rhs).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace fbmcalc
