#include "fbmcalc/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace fbmcalc {

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

Eigen::MatrixXd pairwise_sum(std::span<const Eigen::MatrixXd> x) {
  if (x.empty()) throw std::invalid_argument("pairwise_sum: empty input");
  if (x.size() == 1) return x[0];
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double EnsembleStats::std_error() const {
  return replicates > 0 ? std::sqrt(variance / static_cast<double>(replicates)) : 0.0;
}

double EnsembleStats::half_width(double z) const { return z * std_error(); }

EnsembleStats summarize(std::span<const double> x) {
  EnsembleStats s;
  s.replicates = x.size();
  if (x.empty()) return s;
  s.mean = pairwise_sum(x) / static_cast<double>(x.size());
  if (x.size() > 1) {
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - s.mean) * (x[i] - s.mean);
    s.variance = pairwise_sum(sq) / static_cast<double>(x.size() - 1);
  }
  return s;
}

}  // namespace fbmcalc
