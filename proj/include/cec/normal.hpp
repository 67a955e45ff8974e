#pragma once

namespace cec {

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal quantile. Domain error outside (0, 1).
double norm_quantile(double p);

}  // namespace cec
