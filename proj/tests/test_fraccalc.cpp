#include "fbmcalc/fraccalc.hpp"

#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <vector>

using namespace fbmcalc;

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

GridFunction sampled(Eigen::Index n, double (*fn)(double), double a = 0.0, double b = 1.0) {
  return GridFunction::sample(a, b, n, fn);
}

// Oracle: (1/Gamma(alpha)) int_a^t f(u) (t-u)^(alpha-1) du by tanh-sinh quadrature,
// which copes with the endpoint singularity directly.
template <typename F>
double quadrature_left_integral(F f, double a, double t, double alpha) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto integrand = [&](double u, double dist_to_end) {
    // dist_to_end is the distance to the nearer endpoint; use it near t for accuracy.
    const double s = (u > 0.5 * (a + t) && dist_to_end > 0) ? dist_to_end : t - u;
    return f(u) * std::pow(s, alpha - 1.0);
  };
  return ts.integrate(integrand, a, t, 1e-13) / std::tgamma(alpha);
}

// Oracle: closed-form Riemann-Liouville derivative of the piecewise-linear
// interpolant, written as a sum of ramps (independent of the Weyl sum).
double ramp_sum_derivative(const GridFunction& f, Eigen::Index k, double alpha) {
  const double t = f.node(k);
  const double h = f.spacing();
  double out = f.values()[0] * std::pow(t - f.a(), -alpha) / std::tgamma(1.0 - alpha);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double slope = (f.values()[j + 1] - f.values()[j]) / h;
    out += slope * (std::pow(t - f.node(j), 1.0 - alpha) - std::pow(t - f.node(j + 1), 1.0 - alpha)) /
           std::tgamma(2.0 - alpha);
  }
  return out;
}

}  // namespace

TEST_SUITE("fraccalc") {

TEST_CASE("integral of a constant at order one is the running integral") {
  const auto one = sampled(64, [](double) { return 1.0; });
  const auto out = fractional_integral(one, 1.0);
  CHECK(max_abs(out.values() - one.nodes()) <= 1e-12);
  CHECK(out.values()[0] == 0.0);
  const auto right = fractional_integral(one, 0.7, Side::Right);
  CHECK(right.values()[right.intervals()] == 0.0);
}

TEST_CASE("half-order integral of t matches quadrature of the defining integral") {
  const Eigen::Index n = 256;
  const auto f = sampled(n, [](double t) { return t; });
  const auto out = fractional_integral(f, 0.5);
  for (Eigen::Index k : {1, 7, 64, 200, 256}) {
    const double t = f.node(k);
    const double oracle = quadrature_left_integral([](double u) { return u; }, 0.0, t, 0.5);
    const double closed = std::tgamma(2.0) / std::tgamma(2.5) * std::pow(t, 1.5);
    CHECK(oracle == doctest::Approx(closed).epsilon(1e-10));
    // t is linear, so product integration is exact on it.
    CHECK(out.values()[k] == doctest::Approx(oracle).epsilon(1e-11));
  }
}

TEST_CASE("smooth integrand converges at second order against the quadrature oracle") {
  std::vector<double> err;
  for (Eigen::Index n : {64, 128, 256}) {
    const auto f = sampled(n, [](double t) { return std::cos(3.0 * t); });
    const auto out = fractional_integral(f, 0.35);
    double e = 0.0;
    for (Eigen::Index k = 0; k <= n; k += n / 8) {
      if (k == 0) continue;
      const double oracle =
          quadrature_left_integral([](double u) { return std::cos(3.0 * u); }, 0.0, f.node(k), 0.35);
      e = std::max(e, std::abs(out.values()[k] - oracle));
    }
    err.push_back(e);
  }
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[1] / err[2] > 3.0);
}

TEST_CASE("reflection: R I_{a+} f equals I_{b-} R f") {
  const auto f = sampled(500, [](double t) { return std::exp(t) * std::sin(5.0 * t); }, -1.0, 2.0);
  for (double alpha : {0.3, 1.0, 1.7}) {
    const auto lhs = fractional_integral(f, alpha, Side::Left).reflected();
    const auto rhs = fractional_integral(f.reflected(), alpha, Side::Right);
    CHECK(max_abs(lhs.values() - rhs.values()) <= 1e-12);
  }
}

TEST_CASE("semigroup residual shrinks when the grid doubles") {
  auto residual = [](Eigen::Index n) {
    const auto f = sampled(n, [](double t) { return std::sin(t); });
    double r = 0.0;
    for (double a : {0.25, 0.5, 0.75})
      for (double b : {0.25, 0.5, 0.75}) {
        const auto lhs = fractional_integral(fractional_integral(f, b), a);
        const auto rhs = fractional_integral(f, a + b);
        r = std::max(r, max_abs(lhs.values() - rhs.values()));
      }
    return r;
  };
  const double r1 = residual(512);
  const double r2 = residual(1024);
  CHECK(r2 <= 1e-4);
  CHECK(r1 / r2 >= 1.5);
}

TEST_CASE("fractional integration by parts") {
  auto residual = [](Eigen::Index n, double alpha) {
    const auto f = sampled(n, [](double t) { return std::exp(t); });
    const auto g = sampled(n, [](double t) { return std::cos(t); });
    const double lhs =
        trapezoid(GridFunction(0, 1, f.values().cwiseProduct(fractional_integral(g, alpha, Side::Right).values())));
    const double rhs =
        trapezoid(GridFunction(0, 1, fractional_integral(f, alpha).values().cwiseProduct(g.values())));
    return std::abs(lhs - rhs);
  };
  for (double alpha : {0.25, 0.5, 1.5}) {
    CHECK(residual(1024, alpha) < 1e-4);
    CHECK(residual(512, alpha) / residual(1024, alpha) >= 1.5);
  }
}

TEST_CASE("Weyl derivative agrees with the closed-form derivative of the interpolant") {
  // Irregular data so every cell has its own slope.
  Eigen::VectorXd v(41);
  for (Eigen::Index k = 0; k <= 40; ++k) v[k] = std::sin(1.3 * k) + 0.1 * k;
  const GridFunction f(0.0, 2.0, v);
  for (double alpha : {0.2, 0.5, 0.9}) {
    const auto d = fractional_derivative(f, alpha);
    for (Eigen::Index k = 1; k <= 40; ++k)
      CHECK(d.values()[k] == doctest::Approx(ramp_sum_derivative(f, k, alpha)).epsilon(1e-10));
  }
}

TEST_CASE("derivative of a constant keeps only the boundary term") {
  const double c = 2.5;
  const auto f = sampled(128, [](double) { return 2.5; });
  const auto d = fractional_derivative(f, 0.5);
  for (Eigen::Index k = 1; k <= 128; ++k)
    CHECK(d.values()[k] == doctest::Approx(c * std::pow(f.node(k), -0.5) / std::tgamma(0.5)).epsilon(1e-12));
  CHECK(std::isinf(d.values()[0]));
  CHECK(d.values()[0] > 0);
}

TEST_CASE("right-sided derivative of a constant") {
  const auto f = sampled(128, [](double) { return 1.0; });
  const auto d = fractional_derivative(f, 0.3, Side::Right);
  for (Eigen::Index k = 0; k < 128; ++k)
    CHECK(d.values()[k] == doctest::Approx(std::pow(1.0 - f.node(k), -0.3) / std::tgamma(0.7)).epsilon(1e-12));
}

TEST_CASE("derivative undoes the integral") {
  const auto f = sampled(4096, [](double t) { return std::sin(t); });
  const auto back = fractional_derivative(fractional_integral(f, 0.3), 0.3);
  CHECK(max_abs(back.values() - f.values()) <= 1e-4);
}

TEST_CASE("integral undoes the derivative on the range of I^alpha") {
  // g = I^alpha of a smooth function vanishing at a.
  auto residual = [](Eigen::Index n) {
    const auto f = sampled(n, [](double t) { return t * std::exp(t); });
    const auto g = fractional_integral(f, 0.4);
    const auto back = fractional_integral(fractional_derivative(g, 0.4), 0.4);
    return max_abs(back.values() - g.values());
  };
  const double r1 = residual(512);
  const double r2 = residual(1024);
  CHECK(r2 < 1e-4);
  CHECK(r1 / r2 >= 1.5);
}

TEST_CASE("derivative matches d/dx of I^(1-alpha) away from the endpoint") {
  auto gap = [](Eigen::Index n) {
    const auto f = sampled(n, [](double t) { return std::sin(t); });
    const auto weyl = fractional_derivative(f, 0.5);
    const auto fd = finite_difference_derivative(fractional_integral(f, 0.5));
    double g = 0.0;
    for (Eigen::Index k = n / 10; k < n; ++k) g = std::max(g, std::abs(weyl.values()[k] - fd.values()[k]));
    return g;
  };
  const double g1 = gap(512);
  const double g2 = gap(1024);
  CHECK(g2 < 1e-5);
  CHECK(g1 / g2 >= 1.5);
}

TEST_CASE("I^alpha f approaches f as alpha goes to zero") {
  const auto f = sampled(1024, [](double t) { return std::exp(-10.0 * (t - 0.5) * (t - 0.5)); });
  // I^alpha f(a) = 0 for every alpha, so measure the deviation in L1.
  double previous = 1e300;
  for (double alpha : {0.2, 0.1, 0.05, 0.01}) {
    const Eigen::VectorXd gap = (fractional_integral(f, alpha).values() - f.values()).cwiseAbs();
    const double dev = trapezoid(GridFunction(0, 1, gap));
    CHECK(dev < previous);
    previous = dev;
  }
  CHECK(previous < 0.05);
}

TEST_CASE("Cauchy repeated integration") {
  const auto one = sampled(256, [](double) { return 1.0; });
  const auto twice = cauchy_repeated_integral(one, 2);
  for (Eigen::Index k = 0; k <= 256; ++k)
    CHECK(twice.values()[k] == doctest::Approx(0.5 * one.node(k) * one.node(k)).epsilon(1e-12));

  // f(t) = t, m = 3 against three cumulative trapezoid passes at 10x resolution.
  const Eigen::Index n = 256;
  const auto f = sampled(n, [](double t) { return t; });
  const auto cauchy = cauchy_repeated_integral(f, 3);
  Eigen::VectorXd fine = GridFunction::sample(0, 1, 10 * n, [](double t) { return t; }).values();
  for (int pass = 0; pass < 3; ++pass) fine = cumulative_trapezoid(fine, 1.0 / (10.0 * n));
  for (Eigen::Index k = 0; k <= n; ++k) {
    CHECK(cauchy.values()[k] == doctest::Approx(std::pow(f.node(k), 4) / 24.0).epsilon(1e-11));
    CHECK(std::abs(cauchy.values()[k] - fine[10 * k]) < 1e-7);
  }

  const auto once = cauchy_repeated_integral(f, 1);
  const auto frac = fractional_integral(f, 1.0);
  CHECK(once.values() == frac.values());
  CHECK_THROWS_AS(cauchy_repeated_integral(f, 0), std::invalid_argument);
}

TEST_CASE("derivative of a power function with exponent alpha-1") {
  const Eigen::Index n = 512;
  const double alpha = 0.5;
  const GridFunction f(0.0, 1.0, Eigen::VectorXd::Ones(n + 1), alpha - 1.0);
  const auto chain = fractional_integral(f, 1.0 - alpha);
  for (Eigen::Index k = 1; k <= n; ++k) CHECK(chain.values()[k] == doctest::Approx(std::tgamma(alpha)).epsilon(1e-13));
  const auto d = fractional_derivative(f, alpha);
  CHECK(max_abs(d.values().segment(1, n - 1)) <= 1e-12);

  const GridFunction g(0.0, 1.0, Eigen::VectorXd::Ones(n + 1), 0.3 - 1.0);
  CHECK(max_abs(fractional_derivative(g, 0.3).values().segment(1, n - 1)) <= 1e-10);
}

TEST_CASE("weighted operators reproduce the power rule") {
  // f(t) = t^beta (2 + 3t): D^alpha t^p = Gamma(p+1)/Gamma(p+1-alpha) t^(p-alpha).
  const Eigen::Index n = 64;
  const double beta = -0.4;
  const double alpha = 0.35;
  const auto phi = GridFunction::sample(0, 1, n, [](double t) { return 2.0 + 3.0 * t; });
  const GridFunction f(0.0, 1.0, phi.values(), beta);
  const auto d = fractional_derivative(f, alpha);
  const auto i = fractional_integral(f, alpha);
  auto rule = [](double p, double order, double t) {
    return std::tgamma(p + 1.0) / std::tgamma(p + 1.0 - order) * std::pow(t, p - order);
  };
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double t = f.node(k);
    CHECK(d.values()[k] == doctest::Approx(2.0 * rule(beta, alpha, t) + 3.0 * rule(beta + 1, alpha, t)).epsilon(1e-10));
    CHECK(i.values()[k] == doctest::Approx(2.0 * rule(beta, -alpha, t) + 3.0 * rule(beta + 1, -alpha, t)).epsilon(1e-10));
  }
}

TEST_CASE("weighted derivative with kinks matches a quadrature oracle of the Weyl form") {
  // phi has a kink at t = 0.5; f = t^beta phi is exactly what the interpolant represents.
  const Eigen::Index n = 16;
  const double beta = -0.3;
  const double alpha = 0.45;
  auto phi = [](double t) { return 1.0 + std::abs(t - 0.5) + 0.25 * t; };
  auto fn = [&](double u) { return std::pow(u, beta) * phi(u); };
  const GridFunction f(0.0, 1.0, GridFunction::sample(0, 1, n, phi).values(), beta);
  const auto d = fractional_derivative(f, alpha);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (Eigen::Index k : {3, 8, 9, 12, 16}) {
    const double t = f.node(k);
    // Near 0 integrate in u, near t in v = t - u, split at the kink.
    auto in_u = [&](double u) { return (fn(t) - fn(u)) * std::pow(t - u, -alpha - 1.0); };
    auto in_v = [&](double v) {
      const double diff = fn(t) - fn(t - v);
      return diff == 0.0 ? 0.0 : diff * std::pow(v, -alpha - 1.0);
    };
    const double split = t > 0.5 ? 0.5 : 0.5 * t;
    const double integral = ts.integrate(in_u, 0.0, split, 1e-13) + ts.integrate(in_v, 0.0, t - split, 1e-13);
    const double oracle = (fn(t) * std::pow(t, -alpha) + alpha * integral) / std::tgamma(1.0 - alpha);
    CHECK(d.values()[k] == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("whole-line integral collapses to the one-sided operator for compact support") {
  const auto hat = sampled(512, [](double t) { return std::max(0.0, 0.25 - std::abs(t - 0.5)); });
  const auto whole = whole_line_fractional_integral(hat, 0.5, Side::Left, 100, 50);
  const auto one_sided = fractional_integral(hat, 0.5, Side::Left);
  CHECK(max_abs(whole.values().segment(100, 513) - one_sided.values()) <= 1e-10);
  CHECK(max_abs(whole.values().head(100)) == 0.0);
}

TEST_CASE("whole-line integral of an indicator gives the fBm moving-average kernel") {
  // 1_[0,1] sampled with the half value at the jump; evaluate at s < 0 on an extended grid.
  const double H = 0.75;
  const double alpha = H - 0.5;
  const Eigen::Index n = 1024;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n + 1);
  v[0] = 0.5;
  v[n] = 0.5;
  const GridFunction indicator(0.0, 1.0, v);
  const Eigen::Index pad = 2 * n;
  // Kernel (u - s)^(alpha-1) over u > s.
  const auto out = whole_line_fractional_integral(indicator, alpha, Side::Right, pad, 1);
  double worst = 0.0;
  for (Eigen::Index k = 0; k <= pad - n / 10; ++k) {
    const double s = out.node(k);
    const double kernel = (std::pow(1.0 - s, alpha) - std::pow(-s, alpha)) / std::tgamma(H + 0.5);
    worst = std::max(worst, std::abs(out.values()[k] - kernel));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("fractal integral") {
  const Eigen::Index n = 4096;
  const auto g_smooth = sampled(n, [](double t) { return t * t; });
  const auto constant = sampled(n, [](double) { return 3.0; });
  CHECK(fractal_integral(constant, g_smooth, 0.5) == doctest::Approx(3.0).epsilon(1e-8));

  const auto id = sampled(n, [](double t) { return t; });
  CHECK(std::abs(fractal_integral(id, id, 0.5) - 0.5) < 1e-3);

  const auto s = sampled(n, [](double t) { return std::sin(t); });
  const double stieltjes = 2.0 * (std::sin(1.0) - std::cos(1.0));  // int sin(t) 2t dt
  for (double alpha : {0.0, 0.3, 0.5, 0.7, 1.0})
    CHECK(std::abs(fractal_integral(s, g_smooth, alpha) - stieltjes) < 1e-3);

  CHECK_THROWS_AS(fractal_integral(s, g_smooth, 1.2), std::invalid_argument);
  CHECK_THROWS_AS(fractal_integral(s, sampled(100, [](double t) { return t; }), 0.5), std::invalid_argument);
}

TEST_CASE("error paths") {
  const auto f = sampled(16, [](double t) { return t; });
  CHECK_THROWS_AS(fractional_integral(f, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fractional_integral(f, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(fractional_derivative(f, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fractional_derivative(f, 1.3), std::invalid_argument);
  CHECK_THROWS_AS(fractional_derivative(f, DifferintegralSpec{0.5, Side::Left, OperatorKind::Integral}),
                  std::invalid_argument);
  CHECK_THROWS_AS(whole_line_fractional_integral(f, 1.0, Side::Left), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(0, 1, Eigen::VectorXd::Ones(2)), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(1, 0, Eigen::VectorXd::Ones(5)), std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(5);
  bad[2] = std::nan("");
  CHECK_THROWS_AS(GridFunction(0, 1, bad), std::invalid_argument);
  const GridFunction w(0, 1, Eigen::VectorXd::Ones(9), -0.5);
  CHECK_THROWS_AS(fractional_derivative(w, 0.5, Side::Right), std::invalid_argument);
  CHECK_THROWS_AS(fractional_integral(w, 0.5, Side::Right), std::invalid_argument);
}

}  // TEST_SUITE
