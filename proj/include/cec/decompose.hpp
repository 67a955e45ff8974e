#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cec/matrix.hpp"

namespace cec {

/// h(z_i, U_i) = P[Z < z_i] + U_i P[Z = z_i] under the empirical law of z.
/// U_i comes from substream (seed, transform, i).
std::vector<double> distributional_transform(std::span<const double> z,
                                             std::uint64_t seed);

/// Generalized inverse of the empirical CDF: the ceil(p n)-th order statistic.
double empirical_quantile(std::span<const double> sorted, double p);

/// Conditional law of X given S estimated from pairs (X, S), sorted by S once
/// so that repeated queries are cheap.
class ConditionalQuantile {
 public:
  /// `x[i]` is paired with `s[i]`.
  ConditionalQuantile(std::span<const double> x, std::span<const double> s);

  std::size_t neighbors() const noexcept { return k_; }
  /// v-quantile of X over the k = ceil(sqrt(m)) pairs whose S is nearest s.
  double operator()(double s, double v) const;

 private:
  std::vector<double> s_sorted_;
  std::vector<double> x_by_s_;
  std::size_t k_;
};

/// One-shot form on an m x 2 population with columns (X, S).
double conditional_quantile(const Matrix& population, double s, double v);

struct AllocationResult {
  Matrix values;                // column k has the law of population column k
  std::vector<double> z_tilde;
  /// Per row: U (the transform draw for z_tilde) followed by V_1..V_{N-1}.
  Matrix uniforms_used;
  /// Per row: z_tilde and the remainders after each chain step (m x N). The
  /// last entry is the subtracted coordinate before any ulp adjustment.
  Matrix remainders;
  double ks_sum_statistic = 0.0;  // two-sample KS, z_tilde vs population sums
  double ks_sum_critical = 0.0;
  std::vector<std::string> warnings;
};

/// Builds rows with the population's joint law summing exactly to z_tilde.
/// Chain step j draws X_j conditionally on X_j + ... + X_N equalling the
/// current remainder; X_N is what is left, adjusted by at most a few ulps so
/// that rows sum exactly under left-to-right summation.
AllocationResult allocate(const Matrix& population,
                          std::span<const double> z_tilde, std::uint64_t seed);

}  // namespace cec
