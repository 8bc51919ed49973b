#include "fbmcalc/experiments.hpp"

#include "fbmcalc/ensemble.hpp"
#include "fbmcalc/fbm_integrate.hpp"
#include "fbmcalc/fraccalc.hpp"
#include "fbmcalc/gaussian_paths.hpp"
#include "fbmcalc/itocalc.hpp"
#include "fbmcalc/path_stats.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace fbmcalc {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Near: return "near";
    case Relation::AtMost: return "at_most";
    case Relation::AtLeast: return "at_least";
    case Relation::Above: return "above";
    case Relation::Below: return "below";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Error: return "error";
  }
  return "unknown";
}

Check near_check(std::string name, double target, double estimate, double tolerance) {
  return {std::move(name), target, estimate, tolerance, Relation::Near, std::abs(estimate - target) <= tolerance};
}

Check at_most_check(std::string name, double bound, double estimate) {
  return {std::move(name), bound, estimate, 0.0, Relation::AtMost, estimate <= bound};
}

Check at_least_check(std::string name, double bound, double estimate) {
  return {std::move(name), bound, estimate, 0.0, Relation::AtLeast, estimate >= bound};
}

Check above_check(std::string name, double bound, double estimate) {
  return {std::move(name), bound, estimate, 0.0, Relation::Above, estimate > bound};
}

Check below_check(std::string name, double bound, double estimate) {
  return {std::move(name), bound, estimate, 0.0, Relation::Below, estimate < bound};
}

Json ExperimentRecord::to_json() const {
  Json checks_json = Json::array();
  for (const auto& c : checks)
    checks_json.push_back(Json{{"name", c.name},
                               {"target", c.target},
                               {"estimate", c.estimate},
                               {"tolerance", c.tolerance},
                               {"relation", to_string(c.relation)},
                               {"pass", c.pass}});
  Json j;
  j["id"] = id;
  j["title"] = title;
  j["verdict"] = to_string(verdict);
  if (!error.empty()) j["error"] = error;
  j["checks"] = std::move(checks_json);
  j["details"] = details;
  return j;
}

namespace {

struct Context {
  ExperimentOptions options;
  std::uint64_t root = 0;

  std::size_t ensemble(std::size_t built_in) const { return options.replicates ? options.replicates : built_in; }
  std::size_t seeds(std::size_t built_in) const {
    return options.replicates ? std::min(built_in, options.replicates) : built_in;
  }
  RngSeed seed(std::uint64_t stream) const { return RngSeed{root, stream}; }
};

using Body = std::function<void(const Context&, ExperimentRecord&)>;

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t m = x.size() / 2;
  return x.size() % 2 ? x[m] : 0.5 * (x[m - 1] + x[m]);
}

double fraction(const std::vector<bool>& flags) {
  const auto hits = std::count(flags.begin(), flags.end(), true);
  return static_cast<double>(hits) / static_cast<double>(flags.size());
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

// E1 -----------------------------------------------------------------------

struct AlgebraResiduals {
  double semigroup = 0.0, reflection = 0.0, parts = 0.0, identity = 0.0;
};

AlgebraResiduals algebra_residuals(Eigen::Index n) {
  const auto f = GridFunction::sample(0.0, 1.0, n, [](double t) { return std::sin(t); });
  const auto g = GridFunction::sample(0.0, 1.0, n, [](double t) { return std::cos(t); });
  const std::array<double, 3> orders{0.25, 0.5, 0.75};
  AlgebraResiduals r;
  for (double a : orders) {
    for (double b : orders) {
      const auto lhs = fractional_integral(fractional_integral(f, b), a);
      const auto rhs = fractional_integral(f, a + b);
      r.semigroup = std::max(r.semigroup, max_abs(lhs.values() - rhs.values()));
    }
    const auto left = fractional_integral(f, a, Side::Left).reflected();
    const auto right = fractional_integral(f.reflected(), a, Side::Right);
    r.reflection = std::max(r.reflection, max_abs(left.values() - right.values()));

    const double p1 = trapezoid(GridFunction(0.0, 1.0, f.values().cwiseProduct(fractional_integral(g, a, Side::Right).values())));
    const double p2 = trapezoid(GridFunction(0.0, 1.0, fractional_integral(f, a).values().cwiseProduct(g.values())));
    r.parts = std::max(r.parts, std::abs(p1 - p2));

    const auto di = fractional_derivative(fractional_integral(f, a), a);
    r.identity = std::max(r.identity, max_abs(di.values() - f.values()));
  }
  return r;
}

void e1(const Context&, ExperimentRecord& rec) {
  const auto coarse = algebra_residuals(4096);
  const auto fine = algebra_residuals(8192);
  constexpr double kTol = 1e-4;
  constexpr double kFloor = 1e-12;
  struct Row {
    const char* name;
    double c, f;
  };
  const std::array<Row, 4> rows{{{"semigroup", coarse.semigroup, fine.semigroup},
                                 {"reflection", coarse.reflection, fine.reflection},
                                 {"integration by parts", coarse.parts, fine.parts},
                                 {"D^a I^a = id", coarse.identity, fine.identity}}};
  for (const auto& row : rows) {
    rec.checks.push_back(at_most_check(std::string(row.name) + " residual (n=4096)", kTol, row.c));
    if (row.c <= kFloor && row.f <= kFloor)
      rec.checks.push_back(at_most_check(std::string(row.name) + " residual at rounding floor (n=8192)", kFloor, row.f));
    else
      rec.checks.push_back(at_least_check(std::string(row.name) + " shrink ratio 4096->8192", 1.5, row.c / row.f));
    rec.details[row.name] = Json{{"n4096", row.c}, {"n8192", row.f}};
  }
}

// E2 -----------------------------------------------------------------------

void e2(const Context&, ExperimentRecord& rec) {
  constexpr Eigen::Index n = 8192;
  const GridFunction f(0.0, 1.0, Eigen::VectorXd::Ones(n + 1), -0.5);
  const auto d = fractional_derivative(f, 0.5);
  const double interior = max_abs(d.values().segment(1, n - 1));
  rec.checks.push_back(at_most_check("max interior |D^0.5 t^-0.5| (n=8192)", 1e-3, interior));
  rec.details["max_interior"] = interior;
}

// E3 -----------------------------------------------------------------------

void e3(const Context&, ExperimentRecord& rec) {
  constexpr Eigen::Index n = 4096;
  constexpr Eigen::Index refine = 10;
  auto fn = [](double t) { return std::cos(3.0 * t) + t * t; };
  const auto f = GridFunction::sample(0.0, 1.0, n, fn);
  const auto fine = GridFunction::sample(0.0, 1.0, n * refine, fn);
  Eigen::VectorXd oracle = fine.values();
  for (int m = 1; m <= 3; ++m) {
    oracle = cumulative_trapezoid(oracle, fine.spacing());
    if (m < 2) continue;
    const auto c = cauchy_repeated_integral(f, m);
    double err = 0.0;
    for (Eigen::Index k = 0; k <= n; ++k) err = std::max(err, std::abs(c.values()[k] - oracle[k * refine]));
    rec.checks.push_back(at_most_check("m=" + std::to_string(m) + " vs iterated trapezoid (n=4096)", 1e-6, err));
    rec.details["m" + std::to_string(m)] = err;
  }
}

// E4, E5 -------------------------------------------------------------------

/// max_ij |mean(X_i X_j) - target(t_i, t_j)| over nodes 1..n.
template <typename Draw, typename Target>
double covariance_error(const GridSpec& grid, std::size_t replicates, Draw&& draw, Target&& target, unsigned workers) {
  const auto paths = map_replicates(replicates, [&](std::size_t i) -> Eigen::VectorXd {
    return draw(i).values.tail(grid.n_steps);
  }, workers);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(grid.n_steps, grid.n_steps);
  for (const auto& x : paths) acc.selfadjointView<Eigen::Lower>().rankUpdate(x);
  acc = acc.selfadjointView<Eigen::Lower>();
  acc /= static_cast<double>(replicates);
  double err = 0.0;
  for (Eigen::Index i = 0; i < grid.n_steps; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      err = std::max(err, std::abs(acc(i, j) - target(grid.time(i + 1), grid.time(j + 1))));
  return err;
}

void e4(const Context& ctx, ExperimentRecord& rec) {
  const GridSpec grid{1.0, 16};
  const std::size_t reps = ctx.ensemble(10000);
  const double err = covariance_error(
      grid, reps, [&](std::size_t i) { return generate_bm(grid, ctx.seed(i)); },
      [](double s, double t) { return bm_covariance(s, t); }, ctx.options.workers);
  rec.checks.push_back(below_check("max |E[B(s)B(t)] - min(s,t)|", 0.05, err));
  rec.details["replicates"] = reps;
  rec.details["max_error"] = err;
}

void e5(const Context& ctx, ExperimentRecord& rec) {
  const GridSpec grid{1.0, 8};
  const std::size_t reps = ctx.ensemble(10000);
  rec.details["replicates"] = reps;
  std::uint64_t offset = 0;
  for (double H : {0.25, 0.5, 0.75}) {
    auto target = [H](double s, double t) { return fbm_covariance(H, s, t); };
    const FbmCholesky chol(grid, H);
    const double e_chol = covariance_error(
        grid, reps, [&](std::size_t i) { return chol.sample(ctx.seed(offset + i)); }, target, ctx.options.workers);
    offset += reps;
    MovingAverageOptions ma_opts;
    ma_opts.truncation = 50.0 * grid.t_max;
    const FbmMovingAverage ma(grid, H, ma_opts);
    const double e_ma = covariance_error(
        grid, reps, [&](std::size_t i) { return ma.sample(ctx.seed(offset + i)); }, target, ctx.options.workers);
    offset += reps;
    rec.checks.push_back(below_check("cholesky H=" + fmt(H) + " max covariance error", 0.05, e_chol));
    rec.checks.push_back(below_check("moving-average H=" + fmt(H) + " max covariance error", 0.08, e_ma));
    rec.details["H=" + fmt(H)] = Json{{"cholesky", e_chol},
                                      {"moving_average", e_ma},
                                      {"truncation_bias_bound", ma.truncation_bias_bound()}};
  }
}

// E6 -----------------------------------------------------------------------

void e6(const Context& ctx, ExperimentRecord& rec) {
  const std::size_t reps = ctx.ensemble(10000);
  rec.details["replicates"] = reps;
  std::uint64_t root = ctx.root;
  for (double T : {1.0, 2.0}) {
    const auto cmp = endpoint_comparison(bm_ensemble(GridSpec{T, 1024}, root++, reps, ctx.options.workers), T);
    rec.checks.push_back(near_check("T=" + fmt(T) + " mean left sum", 0.0, cmp.left.mean, 0.05));
    rec.checks.push_back(near_check("T=" + fmt(T) + " mean right sum", T, cmp.right.mean, 0.05 * T));
    rec.details["T=" + fmt(T)] = Json{{"left", to_json(cmp.left)}, {"right", to_json(cmp.right)}};
  }
}

// E7 -----------------------------------------------------------------------

void e7(const Context& ctx, ExperimentRecord& rec) {
  const GridSpec grid{1.0, 1 << 14};
  const std::size_t seeds = ctx.seeds(100);
  constexpr int kLevels = 8;
  const auto worst = map_replicates(seeds, [&](std::size_t i) {
    const SamplePath b = generate_bm(grid, ctx.seed(i));
    double w = 0.0;
    for (int l = 0; l < kLevels; ++l) {
      const Eigen::Index stride = Eigen::Index{1} << l;
      std::vector<double> partition;
      double qv = 0.0;
      for (Eigen::Index k = 0; k <= grid.n_steps; k += stride) {
        partition.push_back(b.times[k]);
        if (k > 0) qv += std::pow(b.values[k] - b.values[k - stride], 2);
      }
      const double left = ito_integral(integrands::path_value(), b, partition);
      const double bT = b.values[grid.n_steps];
      w = std::max(w, std::abs(left - (0.5 * bT * bT - 0.5 * qv)));
    }
    return w;
  }, ctx.options.workers);
  const double max_dev = *std::max_element(worst.begin(), worst.end());
  rec.checks.push_back(at_most_check("max |left sum - (B(T)^2 - sum dB^2)/2| over seeds and meshes", 1e-10, max_dev));
  rec.details["seeds"] = seeds;
  rec.details["meshes"] = kLevels;
  rec.details["max_deviation"] = max_dev;
}

// E8 -----------------------------------------------------------------------

void e8(const Context& ctx, ExperimentRecord& rec) {
  const std::size_t reps = ctx.ensemble(10000);
  const auto ens = bm_ensemble(GridSpec{1.0, 256}, ctx.root, reps, ctx.options.workers);
  const std::array<std::pair<const char*, AdaptedIntegrand>, 3> fs{{
      {"f=1", integrands::constant(1.0)},
      {"f=B", integrands::path_value()},
      {"f=t", integrands::deterministic([](double t) { return t; })},
  }};
  for (const auto& [name, f] : fs) {
    const auto iso = isometry_check(f, ens);
    rec.checks.push_back(near_check(std::string("isometry ") + name + ": mean (int f dB)^2 vs mean int f^2 dt", iso.rhs,
                                    iso.lhs, iso.ci + iso.bias_bound));
    rec.details[std::string("isometry ") + name] =
        Json{{"lhs", iso.lhs}, {"rhs", iso.rhs}, {"ci", iso.ci}, {"bias_bound", iso.bias_bound}};
  }

  const GridSpec grid{1.0, 1 << 14};
  const std::size_t seeds = ctx.seeds(100);
  const auto gaps = map_replicates(seeds, [&](std::size_t i) {
    ItoProcess X{0.0, integrands::constant(0.0), integrands::constant(1.0), generate_bm(grid, ctx.seed(reps + i))};
    const auto paths = ito_formula_apply([](double, double x) { return 0.5 * x * x; }, [](double, double) { return 0.0; },
                                         [](double, double x) { return x; }, [](double, double) { return 1.0; }, X);
    return paths.max_gap();
  }, ctx.options.workers);
  const double med = median(gaps);
  rec.checks.push_back(at_most_check("median Ito-formula max gap, g=x^2/2 (n=2^14)", 0.02, med));
  rec.details["ito_gap_median"] = med;
  rec.details["ito_gap_seeds"] = seeds;
}

// E9 -----------------------------------------------------------------------

void e9(const Context& ctx, ExperimentRecord& rec) {
  const GridSpec grid{1.0, 1 << 14};
  const std::size_t qv_seeds = ctx.seeds(100);
  const auto qv = map_replicates(qv_seeds, [&](std::size_t i) { return quadratic_variation(generate_bm(grid, ctx.seed(i))); },
                                 ctx.options.workers);
  double worst = 0.0;
  for (double q : qv) worst = std::max(worst, std::abs(q - 1.0));
  const double mean = summarize(qv).mean;
  rec.checks.push_back(near_check("mean QV of BM on [0,1] (n=2^14)", 1.0, mean, 0.05));
  rec.checks.push_back(at_most_check("max |QV - 1| over seeds", 0.05, worst));
  rec.details["qv_mean"] = mean;
  rec.details["qv_max_deviation"] = worst;

  const std::size_t seeds = ctx.seeds(20);
  const std::array<std::pair<double, VariationVerdict>, 3> cases{{{0.75, VariationVerdict::ConvergesToZero},
                                                                  {0.25, VariationVerdict::Diverges},
                                                                  {0.5, VariationVerdict::Stabilizes}}};
  std::uint64_t offset = qv_seeds;
  for (const auto& [H, expected] : cases) {
    const FbmCirculant gen(grid, H);
    const auto slopes = map_replicates(seeds, [&](std::size_t i) {
      return p_variation(gen.sample(ctx.seed(offset + i)), 2.0, 6);
    }, ctx.options.workers);
    offset += seeds;
    std::vector<bool> hit;
    std::vector<double> s;
    for (const auto& v : slopes) {
      hit.push_back(v.verdict == expected);
      s.push_back(v.slope);
    }
    rec.checks.push_back(above_check("H=" + fmt(H) + " p=2 verdict " + std::string(to_string(expected)) +
                                         " (fraction of seeds)", 0.5, fraction(hit)));
    rec.details["H=" + fmt(H)] = Json{{"median_slope", median(s)}, {"fraction", fraction(hit)}};
  }
}

// E10 ----------------------------------------------------------------------

void e10(const Context& ctx, ExperimentRecord& rec) {
  const std::size_t seeds = ctx.seeds(50);
  const std::array<Eigen::Index, 3> lengths{1 << 10, 1 << 12, 1 << 14};
  std::uint64_t offset = 0;
  for (double H : {0.25, 0.5, 0.75}) {
    std::array<double, 3> rs_err{}, vi_err{};
    std::array<double, 3> rs_med{}, vi_med{};
    for (std::size_t li = 0; li < lengths.size(); ++li) {
      const GridSpec grid{1.0, lengths[li]};
      const FbmCirculant gen(grid, H);
      const auto est = map_replicates(seeds, [&](std::size_t i) {
        const SamplePath p = gen.sample(ctx.seed(offset + i));
        const Eigen::VectorXd inc = p.values.tail(grid.n_steps) - p.values.head(grid.n_steps);
        return std::pair{rescaled_range_hurst(inc).h_hat, variation_index(p).h_hat};
      }, ctx.options.workers);
      offset += seeds;
      std::vector<double> rs, vi, rs_e, vi_e;
      for (const auto& [a, b] : est) {
        rs.push_back(a);
        vi.push_back(b);
        rs_e.push_back(std::abs(a - H));
        vi_e.push_back(std::abs(b - H));
      }
      rs_med[li] = median(rs);
      vi_med[li] = median(vi);
      rs_err[li] = median(rs_e);
      vi_err[li] = median(vi_e);
    }
    const std::string tag = "H=" + fmt(H);
    rec.checks.push_back(near_check(tag + " R/S median h_hat (n=4096)", H, rs_med[1], 0.1));
    rec.checks.push_back(near_check(tag + " variation-index median h_hat (n=4096)", H, vi_med[1], 0.1));
    for (std::size_t li = 0; li + 1 < lengths.size(); ++li) {
      const std::string step = std::to_string(lengths[li]) + "->" + std::to_string(lengths[li + 1]);
      rec.checks.push_back(below_check(tag + " R/S median error decreases " + step, rs_err[li], rs_err[li + 1]));
      rec.checks.push_back(below_check(tag + " variation-index median error decreases " + step, vi_err[li], vi_err[li + 1]));
    }
    Json d;
    for (std::size_t li = 0; li < lengths.size(); ++li)
      d[std::to_string(lengths[li])] = Json{{"rs_median", rs_med[li]},
                                            {"rs_median_error", rs_err[li]},
                                            {"vi_median", vi_med[li]},
                                            {"vi_median_error", vi_err[li]}};
    rec.details[tag] = d;
  }
  rec.details["seeds"] = seeds;
}

// E11 ----------------------------------------------------------------------

void e11(const Context& ctx, ExperimentRecord& rec) {
  const GridSpec grid{1.0, 1 << 14};
  const std::size_t paths = ctx.seeds(20);
  std::uint64_t offset = 0;
  for (double H : {0.25, 0.75}) {
    const FbmCirculant gen(grid, H);
    const auto lag1 = map_replicates(paths, [&](std::size_t i) { return empirical_acf(gen.sample(ctx.seed(offset + i)), 4)[1]; },
                                     ctx.options.workers);
    offset += paths;
    const double mean = summarize(lag1).mean;
    const double theory = theoretical_acf(H, 1);
    rec.checks.push_back(near_check("H=" + fmt(H) + " lag-1 increment autocorrelation", theory, mean, 0.05));

    const auto diag = lrd_diagnostic(H, 10000);
    const double ratio = diag.asymptote_ratio[9999];
    rec.checks.push_back(near_check("H=" + fmt(H) + " asymptote ratio at n=10^4", 1.0, ratio, 0.01));
    rec.details["H=" + fmt(H)] = Json{{"lag1_mean", mean}, {"lag1_theory", theory}, {"asymptote_ratio", ratio}};
  }

  const double long_growth = partial_sum_growth(0.75, 1000000);
  const double short_growth = partial_sum_growth(0.25, 10000000);
  rec.checks.push_back(above_check("H=0.75 last-decade growth of sum |r| (N=10^6): long range", 0.01, long_growth));
  rec.checks.push_back(below_check("H=0.25 last-decade growth of sum |r| (N=10^7): short range", 0.001, short_growth));
  double bm_max = 0.0;
  bool sign_ok = true;
  for (long long n = 1; n <= 1000; ++n) {
    bm_max = std::max(bm_max, std::abs(theoretical_acf(0.5, n)));
    sign_ok = sign_ok && theoretical_acf(0.75, n) > 0.0 && theoretical_acf(0.25, n) < 0.0;
  }
  rec.checks.push_back(at_most_check("H=0.5 max |r(n)|, n=1..1000: independent increments", 1e-15, bm_max));
  rec.checks.push_back(at_least_check("sign law r>0 for H=0.75, r<0 for H=0.25, n=1..1000", 1.0, sign_ok ? 1.0 : 0.0));
  rec.details["growth"] = Json{{"H=0.75,N=1e6", long_growth},
                               {"class_0.75", to_string(classify_dependence(long_growth))},
                               {"H=0.25,N=1e7", short_growth},
                               {"class_0.25", to_string(classify_dependence(short_growth))}};
}

// E12 ----------------------------------------------------------------------

void e12(const Context& ctx, ExperimentRecord& rec) {
  std::uint64_t offset = 0;
  const GridSpec grid{1.0, 1 << 14};
  const auto eps = EpsilonSchedule::grid_default(grid.dt());
  const GridFunction one(0.0, 1.0, Eigen::VectorXd::Ones(grid.n_steps + 1));

  // Telescoping for f = 1.
  {
    const std::size_t seeds = ctx.seeds(10);
    struct Excess {
      double sym = 0, fwd = 0, bwd = 0, ext = 0, ext_abs = 0;
    };
    std::vector<Excess> all;
    for (double H : {0.25, 0.5, 0.75}) {
      const FbmCirculant gen(grid, H);
      auto part = map_replicates(seeds, [&](std::size_t i) {
        const SamplePath g = gen.sample(ctx.seed(offset + i));
        const double inc = g.values[grid.n_steps] - g.values[0];
        const double tol = boundary_tolerance(g, eps.values.back());
        Excess e;
        e.sym = std::abs(symmetric_integral(one, g, eps).value - inc) / tol;
        e.fwd = std::abs(forward_integral(one, g, eps).value - inc) / tol;
        e.bwd = std::abs(backward_integral(one, g, eps).value + inc) / tol;
        const double ext = std::abs(extended_forward_integral(one, g).value - inc);
        e.ext = ext / tol;
        e.ext_abs = H > 0.5 ? ext : 0.0;
        return e;
      }, ctx.options.workers);
      offset += seeds;
      all.insert(all.end(), part.begin(), part.end());
    }
    Excess worst;
    for (const auto& e : all) {
      worst.sym = std::max(worst.sym, e.sym);
      worst.fwd = std::max(worst.fwd, e.fwd);
      worst.bwd = std::max(worst.bwd, e.bwd);
      worst.ext = std::max(worst.ext, e.ext);
      worst.ext_abs = std::max(worst.ext_abs, e.ext_abs);
    }
    rec.checks.push_back(at_most_check("f=1 symmetric: max |error| / boundary tolerance", 1.0, worst.sym));
    rec.checks.push_back(at_most_check("f=1 forward: max |error| / boundary tolerance", 1.0, worst.fwd));
    rec.checks.push_back(at_most_check("f=1 backward (= -increment): max |error| / boundary tolerance", 1.0, worst.bwd));
    rec.checks.push_back(at_most_check("f=1 extended forward: max |error| / boundary tolerance", 1.0, worst.ext));
    rec.checks.push_back(at_most_check("f=1 extended forward, H=0.75: max |error|", 0.02, worst.ext_abs));
    rec.details["telescoping_worst_ratio"] =
        Json{{"symmetric", worst.sym}, {"forward", worst.fwd}, {"backward", worst.bwd}, {"extended_forward", worst.ext}};
    rec.details["extended_forward_max_error_h075"] = worst.ext_abs;
  }

  // Integration by parts for a deterministic bounded-variation integrand.
  {
    const std::size_t seeds = ctx.seeds(10);
    const auto f = GridFunction::sample(0.0, 1.0, grid.n_steps, [](double t) { return std::cos(2.0 * t) + t; });
    double worst = 0.0;
    for (double H : {0.6, 0.75, 0.9}) {
      const FbmCirculant gen(grid, H);
      const auto gaps = map_replicates(seeds, [&](std::size_t i) {
        const SamplePath g = gen.sample(ctx.seed(offset + i));
        return std::abs(symmetric_integral(f, g, eps).value - integration_by_parts_value(f, g));
      }, ctx.options.workers);
      offset += seeds;
      worst = std::max(worst, *std::max_element(gaps.begin(), gaps.end()));
    }
    rec.checks.push_back(at_most_check("max |symmetric - integration by parts|, H in {0.6,0.75,0.9}", 0.01, worst));
    rec.details["parts_max_gap"] = worst;
  }

  // Itô formula without correction term, H = 0.75.
  {
    const std::size_t seeds = ctx.seeds(20);
    std::map<int, double> med;
    for (int log_n : {13, 14, 15}) {
      const GridSpec g_grid{1.0, Eigen::Index{1} << log_n};
      const FbmCirculant gen(g_grid, 0.75);
      const GridFunction zero(0.0, 1.0, Eigen::VectorXd::Zero(g_grid.n_steps + 1));
      const GridFunction unit(0.0, 1.0, Eigen::VectorXd::Ones(g_grid.n_steps + 1));
      const auto gaps = map_replicates(seeds, [&](std::size_t i) {
        const auto X = fractional_forward_process(0.0, zero, unit, gen.sample(ctx.seed(offset + i)));
        return fbm_ito_formula_check([](double, double x) { return 0.5 * x * x; }, [](double, double) { return 0.0; },
                                     [](double, double x) { return x; }, X)
            .max_gap;
      }, ctx.options.workers);
      offset += seeds;
      med[log_n] = median(gaps);
    }
    rec.checks.push_back(at_most_check("H=0.75 median max gap int B dB vs B^2/2 (n=2^14)", 0.02, med[14]));
    rec.checks.push_back(below_check("gap shrinks: median(2^15) < median(2^13)", med[13], med[15]));
    rec.details["ito_gap_median"] = Json{{"2^13", med[13]}, {"2^14", med[14]}, {"2^15", med[15]}};
  }

  // Forward-integral convergence verdicts for f = g = B^H.
  {
    const std::size_t seeds = ctx.seeds(20);
    Json verdicts;
    for (double H : {0.1, 0.25, 0.6, 0.75, 0.9}) {
      const FbmCirculant gen(grid, H);
      const auto conv = map_replicates(seeds, [&](std::size_t i) {
        const SamplePath g = gen.sample(ctx.seed(offset + i));
        return forward_integral(g.as_grid_function(), g, eps).converged ? 1 : 0;
      }, ctx.options.workers);
      offset += seeds;
      const double frac = std::accumulate(conv.begin(), conv.end(), 0.0) / static_cast<double>(seeds);
      if (H > 0.5)
        rec.checks.push_back(above_check("H=" + fmt(H) + " forward int B dB converged (fraction of seeds)", 0.5, frac));
      else
        rec.checks.push_back(above_check("H=" + fmt(H) + " forward int B dB not converged (fraction of seeds)", 0.5, 1.0 - frac));
      verdicts["H=" + fmt(H)] = frac;
    }
    rec.details["forward_converged_fraction"] = verdicts;
  }
}

struct Entry {
  const char* id;
  const char* title;
  Body body;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {"E1", "Fractional operator algebra", e1},
      {"E2", "Derivative of t^-1/2 of order 1/2 vanishes", e2},
      {"E3", "Cauchy repeated-integral formula", e3},
      {"E4", "Brownian covariance", e4},
      {"E5", "fBm covariance, Cholesky and moving-average generators", e5},
      {"E6", "Left vs right endpoint sums of B dB", e6},
      {"E7", "Exact left-sum identity for B dB", e7},
      {"E8", "Ito isometry and Ito formula", e8},
      {"E9", "Quadratic and p-variation", e9},
      {"E10", "Hurst recovery", e10},
      {"E11", "Increment autocorrelation and long-range dependence", e11},
      {"E12", "Pathwise fBm integration", e12},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : registry()) v.emplace_back(e.id);
    return v;
  }();
  return ids;
}

std::vector<std::string> parse_suite(std::string_view suite) {
  if (suite == "all") return experiment_ids();
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= suite.size()) {
    const auto comma = suite.find(',', pos);
    std::string id(suite.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    id.erase(0, id.find_first_not_of(' '));
    id.erase(id.find_last_not_of(' ') + 1);
    const auto& ids = experiment_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      throw std::invalid_argument("unknown experiment '" + id + "' (expected E1..E12 or all)");
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty suite");
  return out;
}

ExperimentRecord run_experiment(const std::string& id, const ExperimentOptions& options) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const Entry& e) { return id == e.id; });
  if (it == reg.end()) throw std::invalid_argument("unknown experiment '" + id + "'");
  ExperimentRecord rec;
  rec.id = it->id;
  rec.title = it->title;
  Context ctx{options, options.root_seed * 1000 + static_cast<std::uint64_t>(it - reg.begin() + 1)};
  const auto start = std::chrono::steady_clock::now();
  try {
    it->body(ctx, rec);
    const bool ok = !rec.checks.empty() &&
                    std::all_of(rec.checks.begin(), rec.checks.end(), [](const Check& c) { return c.pass; });
    rec.verdict = ok ? Verdict::Pass : Verdict::Fail;
  } catch (const std::exception& e) {
    rec.verdict = Verdict::Error;
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::string summary_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = "experiment,check,target,estimate,tolerance,relation,verdict\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& r : records) {
    if (r.verdict == Verdict::Error) {
      out += r.id + "," + quote("error: " + r.error) + ",,,,,error\n";
      continue;
    }
    for (const auto& c : r.checks)
      out += r.id + "," + quote(c.name) + "," + format_double(c.target) + "," + format_double(c.estimate) + "," +
             format_double(c.tolerance) + "," + std::string(to_string(c.relation)) + "," + (c.pass ? "pass" : "fail") + "\n";
  }
  return out;
}

}  // namespace fbmcalc
