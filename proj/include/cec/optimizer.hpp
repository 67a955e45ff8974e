#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cec/copula.hpp"
#include "cec/market.hpp"
#include "cec/matrix.hpp"
#include "cec/targetdist.hpp"

namespace cec {

/// n scenarios x N periods of consumption with their row sums Z.
struct ConsumptionMatrix {
  Matrix values;
  std::vector<double> row_sums;
  std::vector<TargetDistribution> targets;
  Dependence dependence;

  /// Same permutation applied to every column (rows move as a block), so the
  /// scenario cloud keeps its joint law.
  ConsumptionMatrix permuted(std::span<const std::size_t> permutation) const;
};

/// Left-to-right sum of a row; the definition of "row sum" used throughout.
double row_sum(std::span<const double> row) noexcept;

ConsumptionMatrix build_consumption(const CopulaSample& u,
                                    std::span<const TargetDistribution> targets);

/// Permutation p with p[i] = index into z of the value paired with state i.
/// States are ranked by ascending xi and values by descending z, ties broken by
/// original index; inside a block of equal xi the assigned values keep their
/// original index order, so a constant xi yields the identity.
std::vector<std::size_t> rearrange_antimonotone(std::span<const double> z,
                                                std::span<const double> xi);

struct CostResult {
  double cost = 0.0;
  std::vector<std::size_t> permutation;
  std::vector<double> z_star;  // z_star[i] = z[permutation[i]], paired with xi[i]
  double std_error = 0.0;

  friend bool operator==(const CostResult&, const CostResult&) = default;
};

/// (1/n) sum xi_i z*_i with z* the antimonotone rearrangement of z, or z as
/// given when `rearranged` is false.
CostResult cost(std::span<const double> z, std::span<const double> xi,
                bool rearranged = true);
CostResult cost(const ConsumptionMatrix& m, const StatePriceSample& kernel,
                bool rearranged = true);

/// Full pipeline: kernel, copula, consumption, rearrangement, cost. The kernel
/// and copula use separate substreams of `seed`.
CostResult efficient_cost(std::span<const TargetDistribution> targets,
                          const Dependence& dependence, const ModelSpec& model,
                          std::size_t n, std::uint64_t seed);

/// Same as efficient_cost with a precomputed kernel sample (which must have
/// been drawn with `seed`, or the result is not the pipeline's).
CostResult efficient_cost(std::span<const TargetDistribution> targets,
                          const Dependence& dependence,
                          const StatePriceSample& kernel, std::uint64_t seed);

struct FrontierPoint {
  double target_std = 0.0;
  double per_period_mean = 0.0;
  double achieved_cost = 0.0;
  double budget = 0.0;
  int iterations = 0;

  friend bool operator==(const FrontierPoint&, const FrontierPoint&) = default;
};

struct FrontierOptions {
  double relative_tolerance = 1e-3;  // |cost - budget| <= tol * budget
  int max_iterations = 60;
};

/// Per-period mean that makes the cost of N lognormal(mean, std) periods
/// equal to the budget, by bisection with common random numbers. Throws
/// RootNotBracketed when the bracket
/// [budget / (5 N e^{-rT}), 5 budget / (N e^{-rT})] does not straddle it.
FrontierPoint frontier_point(double budget, double std,
                             const Dependence& dependence,
                             const StatePriceSample& kernel,
                             const CopulaSample& copula, double horizon_discount,
                             const FrontierOptions& options = {});

std::vector<FrontierPoint> frontier(double budget, std::span<const double> stds,
                                    const Dependence& dependence,
                                    const ModelSpec& model, std::size_t periods,
                                    std::size_t n, std::uint64_t seed,
                                    const FrontierOptions& options = {});

class RootNotBracketed : public std::runtime_error {
 public:
  RootNotBracketed(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

}  // namespace cec
