#include "fbmcalc/itocalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbmcalc {

PathPrefix::PathPrefix(const SamplePath& path, Eigen::Index last) : path_(&path), last_(last) {
  if (last < 0 || last >= path.values.size()) throw std::out_of_range("PathPrefix: node out of range");
}

double PathPrefix::value(Eigen::Index k) const {
  if (k > last_)
    throw AdaptednessError("integrand read node " + std::to_string(k) + " beyond its evaluation node " +
                           std::to_string(last_));
  if (k < 0) throw std::out_of_range("PathPrefix: negative node");
  return path_->values[k];
}

double PathPrefix::time_at(Eigen::Index k) const {
  if (k > last_) throw AdaptednessError("integrand read a time beyond its evaluation node");
  if (k < 0) throw std::out_of_range("PathPrefix: negative node");
  return path_->times[k];
}

double PathPrefix::value_at_time(double s) const {
  if (s > time()) throw AdaptednessError("integrand read the path after its evaluation time");
  const auto& t = path_->times;
  if (s <= t[0]) return path_->values[0];
  const auto it = std::upper_bound(t.data(), t.data() + last_ + 1, s);
  const Eigen::Index k = static_cast<Eigen::Index>(it - t.data());
  if (k > last_) return current();
  const double w = (s - t[k - 1]) / (t[k] - t[k - 1]);
  return (1.0 - w) * path_->values[k - 1] + w * path_->values[k];
}

namespace integrands {

AdaptedIntegrand constant(double c) {
  return [c](double, const PathPrefix&) { return c; };
}

AdaptedIntegrand path_value() {
  return [](double, const PathPrefix& p) { return p.current(); };
}

AdaptedIntegrand deterministic(std::function<double(double)> fn) {
  return [fn = std::move(fn)](double t, const PathPrefix&) { return fn(t); };
}

AdaptedIntegrand linear_combination(double a, AdaptedIntegrand f, double b, AdaptedIntegrand g) {
  return [=](double t, const PathPrefix& p) { return a * f(t, p) + b * g(t, p); };
}

}  // namespace integrands

namespace {

double evaluate(const AdaptedIntegrand& f, const SamplePath& path, Eigen::Index k) {
  const double v = f(path.times[k], PathPrefix(path, k));
  if (!std::isfinite(v)) throw std::domain_error("integrand returned a non-finite value at node " + std::to_string(k));
  return v;
}

std::vector<Eigen::Index> partition_nodes(const SamplePath& path, std::span<const double> partition) {
  std::vector<Eigen::Index> nodes;
  if (partition.empty()) {
    nodes.resize(path.values.size());
    for (Eigen::Index k = 0; k < path.values.size(); ++k) nodes[k] = k;
    return nodes;
  }
  const auto& t = path.times;
  const double slack = 1e-12 * std::max(1.0, std::abs(path.t_max()));
  for (double s : partition) {
    const auto it = std::lower_bound(t.data(), t.data() + t.size(), s - slack);
    if (it == t.data() + t.size() || std::abs(*it - s) > slack)
      throw std::invalid_argument("ito_integral: partition time " + std::to_string(s) + " is not a grid node");
    const Eigen::Index k = static_cast<Eigen::Index>(it - t.data());
    if (!nodes.empty() && k < nodes.back()) throw std::invalid_argument("ito_integral: partition must be nondecreasing");
    nodes.push_back(k);
  }
  return nodes;
}

}  // namespace

double ito_integral(const AdaptedIntegrand& f, const SamplePath& path, std::span<const double> partition) {
  const auto nodes = partition_nodes(path, partition);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Eigen::Index a = nodes[i], b = nodes[i + 1];
    if (a == b) continue;
    sum += evaluate(f, path, a) * (path.values[b] - path.values[a]);
  }
  return sum;
}

Eigen::VectorXd ito_running_integral(const AdaptedIntegrand& f, const SamplePath& path) {
  const Eigen::Index n = path.steps();
  Eigen::VectorXd out(n + 1);
  out[0] = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) out[k + 1] = out[k] + evaluate(f, path, k) * (path.values[k + 1] - path.values[k]);
  return out;
}

PathEnsemble bm_ensemble(const GridSpec& grid, std::uint64_t root, std::size_t replicates, unsigned workers) {
  grid.validate();
  return PathEnsemble{replicates, [grid, root](std::size_t i) { return generate_bm(grid, RngSeed{root, i}); },
                      workers};
}

EndpointComparison endpoint_comparison(const PathEnsemble& ensemble, double T) {
  struct Sums {
    double left = 0.0, right = 0.0;
  };
  const auto sums = map_replicates(
      ensemble.replicates,
      [&](std::size_t i) {
        const SamplePath p = ensemble.draw(i);
        if (std::abs(p.t_max() - T) > 1e-12 * std::max(1.0, T))
          throw std::invalid_argument("endpoint_comparison: path does not end at T");
        Sums s;
        for (Eigen::Index k = 0; k < p.steps(); ++k) {
          const double db = p.values[k + 1] - p.values[k];
          s.left += p.values[k] * db;
          s.right += p.values[k + 1] * db;
        }
        return s;
      },
      ensemble.workers);
  std::vector<double> left(sums.size()), right(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    left[i] = sums[i].left;
    right[i] = sums[i].right;
  }
  EndpointComparison out;
  out.left = summarize(left);
  out.right = summarize(right);
  out.wide_ci = ensemble.replicates < 1000;
  return out;
}

bool IsometryResult::agrees() const { return std::abs(lhs - rhs) <= ci + bias_bound; }

IsometryResult isometry_check(const AdaptedIntegrand& f, const PathEnsemble& ensemble, double z) {
  if (ensemble.replicates < 1000) throw std::invalid_argument("isometry_check: need at least 1000 replicates");
  struct Terms {
    double square = 0.0, energy = 0.0, gap = 0.0;
  };
  const auto terms = map_replicates(
      ensemble.replicates,
      [&](std::size_t i) {
        const SamplePath p = ensemble.draw(i);
        const Eigen::Index n = p.steps();
        double integral = 0.0, trap = 0.0, left = 0.0;
        double prev_sq = 0.0;
        for (Eigen::Index k = 0; k <= n; ++k) {
          const double v = evaluate(f, p, k);
          const double sq = v * v;
          if (k < n) {
            const double dt = p.times[k + 1] - p.times[k];
            integral += v * (p.values[k + 1] - p.values[k]);
            left += sq * dt;
          }
          if (k > 0) trap += 0.5 * (prev_sq + sq) * (p.times[k] - p.times[k - 1]);
          prev_sq = sq;
        }
        return Terms{integral * integral, trap, std::abs(trap - left)};
      },
      ensemble.workers);
  std::vector<double> sq(terms.size()), en(terms.size()), diff(terms.size()), gap(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    sq[i] = terms[i].square;
    en[i] = terms[i].energy;
    diff[i] = terms[i].square - terms[i].energy;
    gap[i] = terms[i].gap;
  }
  IsometryResult r;
  r.replicates = ensemble.replicates;
  r.lhs = summarize(sq).mean;
  r.rhs = summarize(en).mean;
  r.ci = summarize(diff).half_width(z);
  r.bias_bound = summarize(gap).mean;
  return r;
}

QuadraticVariationCheck ito_integral_qv(const AdaptedIntegrand& f, const SamplePath& path) {
  const Eigen::Index n = path.steps();
  QuadraticVariationCheck out;
  double prev_sq = 0.0;
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double v = evaluate(f, path, k);
    if (k < n) {
      const double di = v * (path.values[k + 1] - path.values[k]);
      out.qv += di * di;
    }
    if (k > 0) out.target += 0.5 * (prev_sq + v * v) * (path.times[k] - path.times[k - 1]);
    prev_sq = v * v;
  }
  return out;
}

Eigen::VectorXd ItoProcess::realize() const {
  if (!drift || !diffusion) throw std::invalid_argument("ItoProcess: drift and diffusion are required");
  const SamplePath& b = driving_path;
  const Eigen::Index n = b.steps();
  Eigen::VectorXd x(n + 1);
  x[0] = x0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double dt = b.times[k + 1] - b.times[k];
    x[k + 1] = x[k] + evaluate(drift, b, k) * dt + evaluate(diffusion, b, k) * (b.values[k + 1] - b.values[k]);
  }
  if (!x.allFinite()) throw std::domain_error("ItoProcess: realized path is not finite");
  return x;
}

ItoFormulaPaths ito_formula_apply(const Field& g, const Field& g_t, const Field& g_x, const Field& g_xx,
                                  const ItoProcess& X) {
  const Eigen::VectorXd x = X.realize();
  const SamplePath& b = X.driving_path;
  const Eigen::Index n = b.steps();
  ItoFormulaPaths out;
  out.lhs.resize(n + 1);
  out.rhs.resize(n + 1);
  const double g0 = g(b.times[0], x[0]);
  out.lhs[0] = 0.0;
  out.rhs[0] = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = b.times[k];
    const double dt = b.times[k + 1] - t;
    const double nu = evaluate(X.diffusion, b, k);
    const double gt = g_t(t, x[k]), gx = g_x(t, x[k]), gxx = g_xx(t, x[k]);
    if (!std::isfinite(gt) || !std::isfinite(gx) || !std::isfinite(gxx))
      throw std::domain_error("ito_formula_apply: non-finite derivative at node " + std::to_string(k));
    out.rhs[k + 1] = out.rhs[k] + gt * dt + gx * (x[k + 1] - x[k]) + 0.5 * gxx * nu * nu * dt;
    out.lhs[k + 1] = g(b.times[k + 1], x[k + 1]) - g0;
  }
  return out;
}

}  // namespace fbmcalc
