#include "fbmcalc/fbm_integrate.hpp"
#include "fbmcalc/gaussian_paths.hpp"
#include "fbmcalc/itocalc.hpp"
#include "fbmcalc/path_stats.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace fbmcalc;

namespace {

constexpr Eigen::Index kN = 1 << 14;

SamplePath fbm(double H, std::uint64_t stream, Eigen::Index n = kN) {
  const GridSpec g{1.0, n};
  if (H == 0.5) return generate_bm(g, RngSeed{5, stream});
  return FbmCirculant(g, H).sample(RngSeed{5, stream});
}

SamplePath smooth_path(Eigen::Index n = kN) {
  SamplePath p = generate_bm(GridSpec{1.0, n}, RngSeed{5, 0});
  for (Eigen::Index k = 0; k <= n; ++k) p.values[k] = std::sin(3.0 * p.times[k]) + p.times[k];
  p.generator = Generator::Imported;
  return p;
}

GridFunction constant(double c, Eigen::Index n = kN) { return GridFunction(0.0, 1.0, Eigen::VectorXd::Constant(n + 1, c)); }

double increment(const SamplePath& g) { return g.values[g.steps()] - g.values[0]; }

const EpsilonSchedule& eps() {
  static const EpsilonSchedule e = EpsilonSchedule::grid_default(1.0 / kN);
  return e;
}

}  // namespace

TEST_CASE("epsilon schedule") {
  const double h = 1.0 / 64;
  const EpsilonSchedule d = EpsilonSchedule::grid_default(h);
  REQUIRE(d.values.size() == 5);
  CHECK(d.values.front() == doctest::Approx(32 * h));
  CHECK(d.values.back() == doctest::Approx(2 * h));
  CHECK_NOTHROW(d.validate(h));
  CHECK_THROWS(EpsilonSchedule{{4 * h, 2 * h, 0.5 * h}}.validate(h));
  CHECK_THROWS(EpsilonSchedule{{4 * h, 2 * h}}.validate(h));
  CHECK_THROWS(EpsilonSchedule{{2 * h, 4 * h, 8 * h}}.validate(h));
  CHECK_THROWS(EpsilonSchedule{{4 * h, 2.5 * h, h}}.validate(h));

  const SamplePath g = fbm(0.75, 1, 64);
  CHECK_THROWS(symmetric_integral(constant(1.0, 32), g, d));
}

TEST_CASE("f = 1 telescopes within the boundary tolerance") {
  for (double H : {0.25, 0.5, 0.75}) {
    const SamplePath g = fbm(H, 10);
    const double inc = increment(g);
    const double tol = boundary_tolerance(g, eps().values.back());
    CHECK(std::abs(symmetric_integral(constant(1.0), g, eps()).value - inc) <= tol);
    CHECK(std::abs(forward_integral(constant(1.0), g, eps()).value - inc) <= tol);
    CHECK(std::abs(backward_integral(constant(1.0), g, eps()).value + inc) <= tol);
  }
}

TEST_CASE("symmetric integral") {
  const SamplePath g = fbm(0.75, 11);
  const auto t = GridFunction::sample(0.0, 1.0, kN, [](double s) { return s; });
  CHECK(std::abs(symmetric_integral(t, g, eps()).value - integration_by_parts_value(t, g)) <= 0.01);
  const double end = g.values[kN];
  CHECK(std::abs(symmetric_integral(g.as_grid_function(), g, eps()).value - 0.5 * end * end) <= 0.02);
}

TEST_CASE("forward integral") {
  const SamplePath b = fbm(0.5, 12);
  const IntegralResult fwd = forward_integral(b.as_grid_function(), b, eps());
  const double end = b.values[kN];
  CHECK(std::abs(fwd.value - (0.5 * end * end - 0.5 * quadratic_variation(b))) <= 0.03);
  CHECK(std::abs(fwd.value - ito_integral(integrands::path_value(), b)) <= 0.03);

  const SamplePath rough = fbm(0.25, 13);
  CHECK_FALSE(forward_integral(rough.as_grid_function(), rough, eps()).converged);
  const SamplePath regular = fbm(0.75, 13);
  CHECK(forward_integral(regular.as_grid_function(), regular, eps()).converged);
}

TEST_CASE("backward integral") {
  const SamplePath b = fbm(0.5, 14);
  const GridFunction f = b.as_grid_function();
  const double fwd = forward_integral(f, b, eps()).value;
  const double bwd = -backward_integral(f, b, eps()).value;
  CHECK(std::abs((bwd - fwd) - quadratic_variation(b)) <= 0.05);

  const SamplePath s = smooth_path();
  const GridFunction fs = s.as_grid_function();
  CHECK(std::abs(-backward_integral(fs, s, eps()).value - forward_integral(fs, s, eps()).value) <= 1e-3);
}

TEST_CASE("Riemann-Stieltjes sums") {
  const SamplePath g = fbm(0.75, 15);
  const auto u = GridFunction::sample(0.0, 1.0, kN, [](double t) { return std::sin(t); });
  const IntegralResult r1 = riemann_stieltjes_integral(u, g);
  CHECK(r1.converged);
  CHECK(r1.levels.size() == 6);

  const IntegralResult r2 = riemann_stieltjes_integral(fbm(0.75, 16), g);
  CHECK(r2.converged);

  const SamplePath b = fbm(0.5, 17);
  const IntegralResult r3 = riemann_stieltjes_integral(b, b);
  CHECK(r3.value == doctest::Approx(ito_integral(integrands::path_value(), b)).epsilon(1e-12));
  CHECK(r3.converged);
}

TEST_CASE("covariation") {
  const SamplePath b = fbm(0.5, 18);
  CHECK(std::abs(covariation(b, b, eps()).value - 1.0) <= 0.05);
  const SamplePath x = fbm(0.75, 19);
  CHECK(std::abs(covariation(x, x, eps()).value) <= 0.02);
  const SamplePath s = smooth_path();
  CHECK(std::abs(covariation(b, s, eps()).value) <= 0.01);
  CHECK(std::abs(covariation(b, x, eps()).value - covariation(x, b, eps()).value) <= 1e-12);
}

TEST_CASE("symmetric, forward and covariation") {
  const SamplePath b = fbm(0.5, 20);
  const RelationCheck rb = symmetric_forward_relation_check(b.as_grid_function(), b, eps());
  CHECK(std::abs(rb.residual_half) <= 0.05);
  CHECK(std::abs(rb.residual_full) > 0.3);

  const SamplePath s = smooth_path();
  const RelationCheck rs = symmetric_forward_relation_check(s.as_grid_function(), s, eps());
  CHECK(std::abs(rs.cov) <= 1e-3);
  CHECK(std::abs(rs.symmetric - rs.forward) <= 1e-3);

  const SamplePath x = fbm(0.75, 21);
  const RelationCheck rx = symmetric_forward_relation_check(x.as_grid_function(), x, eps());
  CHECK(std::abs(rx.symmetric - rx.forward) <= 0.02);
  CHECK(std::abs(rx.cov) <= 0.02);

  const SamplePath r = fbm(0.1, 22);
  CHECK_THROWS_AS(symmetric_forward_relation_check(r.as_grid_function(), r, eps()), std::domain_error);
}

TEST_CASE("linearity in the integrand") {
  const SamplePath g = fbm(0.6, 23);
  const GridFunction f1 = g.as_grid_function();
  const auto f2 = GridFunction::sample(0.0, 1.0, kN, [](double t) { return std::exp(-t); });
  const GridFunction mix(0.0, 1.0, 2.0 * f1.values() - 3.0 * f2.values());
  const EpsilonSchedule& e = eps();
  auto lin = [&](auto integral) {
    return std::abs(integral(mix) - (2.0 * integral(f1) - 3.0 * integral(f2)));
  };
  CHECK(lin([&](const GridFunction& f) { return symmetric_integral(f, g, e).value; }) < 1e-12);
  CHECK(lin([&](const GridFunction& f) { return forward_integral(f, g, e).value; }) < 1e-12);
  CHECK(lin([&](const GridFunction& f) { return backward_integral(f, g, e).value; }) < 1e-12);
  CHECK(lin([&](const GridFunction& f) { return riemann_stieltjes_integral(f, g).value; }) < 1e-12);
  CHECK(lin([&](const GridFunction& f) { return extended_forward_integral(f, g).value; }) < 1e-12);
}

TEST_CASE("extended forward integral") {
  const SamplePath g = fbm(0.75, 24);
  CHECK(std::abs(extended_forward_integral(constant(1.0), g).value - increment(g)) <= 0.02);
  const auto f = GridFunction::sample(0.0, 1.0, kN, [](double t) { return std::cos(2.0 * t); });
  CHECK(std::abs(extended_forward_integral(f, g).value - forward_integral(f, g, eps()).value) <= 0.02);

  const double w = extended_forward_weight_sum(1.0, kN, 1e-3);
  CHECK(std::abs(w - 1.0 / std::tgamma(1.001)) <= 1e-6);
  CHECK(std::abs(w - 1.0) <= 1e-3);
  CHECK(std::abs(extended_forward_weight_sum(2.0, kN, 0.01) - std::pow(2.0, 0.01) / std::tgamma(1.01)) <= 1e-6);
}

TEST_CASE("fractional forward process") {
  const SamplePath g = fbm(0.75, 25);
  const FractionalForwardProcess a = fractional_forward_process(0.5, constant(0.0), constant(1.0), g);
  CHECK((a.values - (g.values.array() + 0.5).matrix()).cwiseAbs().maxCoeff() < 1e-12);
  const FractionalForwardProcess b = fractional_forward_process(0.5, constant(1.0), constant(0.0), g);
  CHECK((b.values - (g.times.array() + 0.5).matrix()).cwiseAbs().maxCoeff() < 1e-12);
  const auto t = GridFunction::sample(0.0, 1.0, kN, [](double s) { return s; });
  const FractionalForwardProcess c = fractional_forward_process(0.0, constant(0.0), t, g);
  CHECK(std::abs(c.values[kN] - integration_by_parts_value(t, g)) <= 0.01);
}

TEST_CASE("Ito formula for fBm without second-order term") {
  const Field zero = [](double, double) { return 0.0; };
  const Field one = [](double, double) { return 1.0; };
  const SamplePath g = fbm(0.75, 26);
  const FractionalForwardProcess x = fractional_forward_process(0.0, constant(0.0), constant(1.0), g);
  CHECK(fbm_ito_formula_check([](double, double v) { return 0.5 * v * v; }, zero, [](double, double v) { return v; }, x)
            .max_gap <= 0.02);
  CHECK(fbm_ito_formula_check([](double, double v) { return v; }, zero, one, x).max_gap <= 1e-12);
  const FractionalForwardProcess y = fractional_forward_process(0.0, constant(1.0), constant(1.0), g);
  CHECK(fbm_ito_formula_check([](double t, double v) { return t + v; }, one, one, y).max_gap <= 0.02);

  const SamplePath b = fbm(0.5, 27, 1024);
  const FractionalForwardProcess xb = fractional_forward_process(0.0, constant(0.0, 1024), constant(1.0, 1024), b);
  CHECK_THROWS(fbm_ito_formula_check([](double, double v) { return v; }, zero, one, xb));
}
