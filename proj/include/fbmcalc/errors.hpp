#pragma once

#include <stdexcept>

namespace fbmcalc {

/// A covariance factorization failed even after regularization.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An integrand asked for path information beyond its evaluation time.
class AdaptednessError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fbmcalc
