#include "fbmcalc/ensemble.hpp"
#include "fbmcalc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fbmcalc;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using W = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        W{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        W{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal stream is a pure function of (root, stream)") {
  NormalStream a({7, 3}), b({7, 3});
  const Eigen::VectorXd x = a.take(1001), y = b.take(1001);
  CHECK((x.array() == y.array()).all());

  NormalStream c({7, 4}), d({8, 3});
  CHECK((c.take(1001).array() != x.array()).any());
  CHECK((d.take(1001).array() != x.array()).any());
}

TEST_CASE("take and next agree") {
  NormalStream a({1, 2}), b({1, 2});
  const Eigen::VectorXd x = a.take(5);
  for (Eigen::Index k = 0; k < 5; ++k) CHECK(b.next() == x[k]);
}

TEST_CASE("uniforms lie strictly inside (0, 1)") {
  NormalStream s({0, 0});
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  constexpr int n = 200000;
  NormalStream s({2024, 0});
  const Eigen::VectorXd z = s.take(n);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / (n - 1);
  const double kurt = (z.array() - mean).pow(4).mean() / (var * var);
  // 5 standard errors: sd(mean) = 1/sqrt(n), sd(var) = sqrt(2/n), sd(kurt) = sqrt(24/n).
  CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(kurt - 3.0) < 5.0 * std::sqrt(24.0 / n));
}

TEST_CASE("different streams are uncorrelated") {
  constexpr int n = 20000;
  const Eigen::VectorXd x = NormalStream({5, 0}).take(n);
  const Eigen::VectorXd y = NormalStream({5, 1}).take(n);
  const double corr = (x.array() * y.array()).mean() / std::sqrt(x.squaredNorm() / n * y.squaredNorm() / n);
  CHECK(std::abs(corr) < 5.0 / std::sqrt(n));
}

TEST_CASE("map_replicates is independent of worker count") {
  auto fn = [](std::size_t i) { return NormalStream({11, i}).next(); };
  const auto one = map_replicates(64, fn, 1);
  const auto four = map_replicates(64, fn, 4);
  CHECK(one == four);
  CHECK(pairwise_sum(one) == pairwise_sum(four));
}

TEST_CASE("map_replicates rethrows") {
  auto fn = [](std::size_t i) -> int {
    if (i == 5) throw std::runtime_error("boom");
    return 0;
  };
  CHECK_THROWS_AS(map_replicates(10, fn, 3), std::runtime_error);
}

TEST_CASE("summarize") {
  const std::vector<double> x{1, 2, 3, 4};
  const auto s = summarize(x);
  CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(s.variance == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(s.replicates == 4);
  CHECK(s.half_width(2.0) == doctest::Approx(2.0 * std::sqrt(5.0 / 12.0)));
}
