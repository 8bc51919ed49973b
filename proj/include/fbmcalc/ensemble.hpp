#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

namespace fbmcalc {

/// Worker count used when 0 is requested: hardware concurrency, at least 1.
unsigned default_workers();

/// Evaluates fn(i) for i = 0..count-1 on up to `workers` threads.  Results are
/// stored by index, so the output does not depend on scheduling.  The first
/// exception thrown by any replicate is rethrown after all workers stop.
template <typename F>
auto map_replicates(std::size_t count, F&& fn, unsigned workers = 0)
    -> std::vector<std::decay_t<decltype(fn(std::size_t{}))>> {
  using T = std::decay_t<decltype(fn(std::size_t{}))>;
  std::vector<T> out(count);
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

/// Sum in a fixed pairwise-tree order.
double pairwise_sum(std::span<const double> x);

/// Entrywise pairwise-tree sum of equally shaped matrices.
Eigen::MatrixXd pairwise_sum(std::span<const Eigen::MatrixXd> x);

struct EnsembleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  std::size_t replicates = 0;

  double std_error() const;
  /// z * standard error.
  double half_width(double z = 1.96) const;
};

/// Mean and variance through pairwise sums (two passes).
EnsembleStats summarize(std::span<const double> x);

}  // namespace fbmcalc
