#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>

namespace fbmcalc {

/// (root, stream) fully determines a random stream.  Ensembles use the
/// replicate index as the stream.
struct RngSeed {
  std::uint64_t root = 0;
  std::uint64_t stream = 0;

  bool operator==(const RngSeed&) const = default;
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal variates from a counter-based stream.
///
/// Block i of stream (root, stream) is philox(counter = {i_lo, i_hi, stream_lo, stream_hi},
/// key = {root_lo, root_hi}).  Each block yields two 53-bit uniforms on the open
/// interval (0, 1), u = (m + 1/2) 2^-53, which the Box-Muller transform turns into
/// the pair (r cos 2 pi u2, r sin 2 pi u2), r = sqrt(-2 log u1), emitted in that order.
class NormalStream {
 public:
  explicit NormalStream(RngSeed seed) : seed_(seed) {}

  double next();
  Eigen::VectorXd take(Eigen::Index count);
  void fill(double* out, Eigen::Index count);

  /// Uniform (0,1) variate from the same counter sequence.
  double uniform();

 private:
  std::array<std::uint32_t, 4> next_block();

  RngSeed seed_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fbmcalc
