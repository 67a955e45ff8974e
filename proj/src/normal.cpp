#include "cec/normal.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "cec/errors.hpp"

namespace cec {

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("norm_quantile: p must lie in (0, 1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace cec
