#include "fbmcalc/rng.hpp"

#include <cmath>
#include <numbers>

namespace fbmcalc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

double open_uniform(std::uint32_t hi_word, std::uint32_t lo_word) {
  const std::uint64_t m = (static_cast<std::uint64_t>(hi_word) << 21) ^ (lo_word >> 11);
  return (static_cast<double>(m & ((std::uint64_t{1} << 53) - 1)) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<std::uint32_t, 4> NormalStream::next_block() {
  const std::uint64_t i = block_++;
  return philox4x32({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32),
                     static_cast<std::uint32_t>(seed_.stream), static_cast<std::uint32_t>(seed_.stream >> 32)},
                    {static_cast<std::uint32_t>(seed_.root), static_cast<std::uint32_t>(seed_.root >> 32)});
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const auto w = next_block();
  const double u1 = open_uniform(w[0], w[1]);
  const double u2 = open_uniform(w[2], w[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double NormalStream::uniform() {
  const auto w = next_block();
  return open_uniform(w[0], w[1]);
}

void NormalStream::fill(double* out, Eigen::Index count) {
  for (Eigen::Index k = 0; k < count; ++k) out[k] = next();
}

Eigen::VectorXd NormalStream::take(Eigen::Index count) {
  Eigen::VectorXd z(count);
  fill(z.data(), count);
  return z;
}

}  // namespace fbmcalc
