#include "cec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cec/errors.hpp"
#include "cec/normal.hpp"

namespace cec {

double row_sum(std::span<const double> row) noexcept {
  double s = 0.0;
  for (double x : row) s += x;
  return s;
}

ConsumptionMatrix ConsumptionMatrix::permuted(
    std::span<const std::size_t> permutation) const {
  if (permutation.size() != values.rows()) {
    throw SizeMismatch("permuted: permutation length differs from row count");
  }
  ConsumptionMatrix out{Matrix(values.rows(), values.cols()),
                        std::vector<double>(values.rows()), targets, dependence};
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    const auto src = values.row(permutation[i]);
    std::copy(src.begin(), src.end(), out.values.row(i).begin());
    out.row_sums[i] = row_sums[permutation[i]];
  }
  return out;
}

ConsumptionMatrix build_consumption(
    const CopulaSample& u, std::span<const TargetDistribution> targets) {
  const auto n = u.values.rows();
  const auto periods = u.values.cols();
  if (targets.size() != periods) {
    throw SizeMismatch(fmt::format(
        "build_consumption: {} targets for {} copula columns", targets.size(),
        periods));
  }
  ConsumptionMatrix m{Matrix(n, periods), std::vector<double>(n),
                      std::vector<TargetDistribution>(targets.begin(), targets.end()),
                      u.dependence};
  for (std::size_t i = 0; i < n; ++i) {
    auto row = m.values.row(i);
    const auto src = u.values.row(i);
    for (std::size_t k = 0; k < periods; ++k) row[k] = targets[k].quantile(src[k]);
    m.row_sums[i] = row_sum(row);
  }
  return m;
}

std::vector<std::size_t> rearrange_antimonotone(std::span<const double> z,
                                                std::span<const double> xi) {
  const auto n = z.size();
  if (xi.size() != n) {
    throw SizeMismatch(fmt::format(
        "rearrange_antimonotone: |z| = {} but |xi| = {}", n, xi.size()));
  }
  if (n == 0) throw SizeMismatch("rearrange_antimonotone: empty input");

  std::vector<std::size_t> states(n);
  std::iota(states.begin(), states.end(), std::size_t{0});
  std::stable_sort(states.begin(), states.end(),
                   [&](std::size_t a, std::size_t b) { return xi[a] < xi[b]; });

  std::vector<std::size_t> values(n);
  std::iota(values.begin(), values.end(), std::size_t{0});
  std::stable_sort(values.begin(), values.end(),
                   [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });

  std::vector<std::size_t> perm(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && xi[states[end]] == xi[states[start]]) ++end;
    if (end - start == 1) {
      perm[states[start]] = values[start];
    } else {
      // Equal xi: any assignment costs the same; pair in index order.
      std::vector<std::size_t> block_states(states.begin() + start, states.begin() + end);
      std::vector<std::size_t> block_values(values.begin() + start, values.begin() + end);
      std::sort(block_states.begin(), block_states.end());
      std::sort(block_values.begin(), block_values.end());
      for (std::size_t j = 0; j < block_states.size(); ++j) {
        perm[block_states[j]] = block_values[j];
      }
    }
    start = end;
  }
  return perm;
}

CostResult cost(std::span<const double> z, std::span<const double> xi,
                bool rearranged) {
  const auto n = z.size();
  if (xi.size() != n) {
    throw SizeMismatch(fmt::format("cost: {} consumption rows but {} kernel draws",
                                   n, xi.size()));
  }
  if (n == 0) throw SizeMismatch("cost: empty input");

  CostResult out;
  if (rearranged) {
    out.permutation = rearrange_antimonotone(z, xi);
  } else {
    out.permutation.resize(n);
    std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});
  }
  out.z_star.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.z_star[i] = z[out.permutation[i]];
    sum += xi[i] * out.z_star[i];
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = xi[i] * out.z_star[i] - mean;
    ss += d * d;
  }
  out.cost = mean;
  out.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) /
                                    static_cast<double>(n))
                        : 0.0;
  return out;
}

CostResult cost(const ConsumptionMatrix& m, const StatePriceSample& kernel,
                bool rearranged) {
  return cost(m.row_sums, kernel.xi, rearranged);
}

namespace {

CopulaSample draw_copula(std::size_t n, std::size_t periods,
                         const Dependence& dependence, std::uint64_t seed) {
  if (periods == 0) throw DomainError("need at least one target period");
  // A single period has no dependence structure to speak of.
  if (periods == 1) return sample_independent(n, 1, seed);
  return sample(n, periods, dependence, seed);
}

}  // namespace

CostResult efficient_cost(std::span<const TargetDistribution> targets,
                          const Dependence& dependence,
                          const StatePriceSample& kernel, std::uint64_t seed) {
  const auto copula = draw_copula(kernel.xi.size(), targets.size(), dependence, seed);
  const auto m = build_consumption(copula, targets);
  return cost(m, kernel);
}

CostResult efficient_cost(std::span<const TargetDistribution> targets,
                          const Dependence& dependence, const ModelSpec& model,
                          std::size_t n, std::uint64_t seed) {
  if (dependence.clayton) dependence.clayton->check_dimension(targets.size());
  const auto kernel = state_price(n, model, seed);
  return efficient_cost(targets, dependence, kernel, seed);
}

FrontierPoint frontier_point(double budget, double std,
                             const Dependence& dependence,
                             const StatePriceSample& kernel,
                             const CopulaSample& copula, double horizon_discount,
                             const FrontierOptions& options) {
  (void)dependence;
  if (!(budget > 0.0)) throw DomainError(fmt::format("budget must be > 0, got {}", budget));
  if (!(std > 0.0)) throw DomainError(fmt::format("std must be > 0, got {}", std));
  const auto n = copula.values.rows();
  const auto periods = copula.values.cols();
  if (kernel.xi.size() != n) {
    throw SizeMismatch("frontier_point: kernel and copula sample sizes differ");
  }

  // Normal scores are shared by every bisection iterate; quantile(u) of a
  // lognormal is exp(log_m + log_v * score), exactly as TargetDistribution
  // computes it.
  std::vector<double> scores(n * periods);
  const auto u = copula.values.data();
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = norm_quantile(u[i]);

  std::vector<double> z(n);
  auto evaluate = [&](double mean) {
    const auto target = TargetDistribution::from_mean_std(mean, std);
    const double lm = target.log_m();
    const double lv = target.log_v();
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < periods; ++k) {
        s += std::exp(lm + lv * scores[i * periods + k]);
      }
      z[i] = s;
    }
    return cost(z, kernel.xi).cost;
  };

  const double scale = static_cast<double>(periods) * horizon_discount;
  double lo = budget / (5.0 * scale);
  double hi = 5.0 * budget / scale;
  const double cost_lo = evaluate(lo);
  const double cost_hi = evaluate(hi);
  if (!(cost_lo <= budget && cost_hi >= budget)) {
    throw RootNotBracketed(
        fmt::format("frontier: budget {} not bracketed for std {}: cost({}) = "
                    "{}, cost({}) = {}",
                    budget, std, lo, cost_lo, hi, cost_hi),
        lo, hi);
  }

  FrontierPoint point{std, lo, cost_lo, budget, 0};
  double best_gap = std::abs(cost_lo - budget);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    const double c = evaluate(mid);
    point.iterations = iter;
    if (std::abs(c - budget) < best_gap) {
      best_gap = std::abs(c - budget);
      point.per_period_mean = mid;
      point.achieved_cost = c;
    }
    if (c == budget || mid <= lo || mid >= hi) break;
    (c < budget ? lo : hi) = mid;
  }
  if (best_gap > options.relative_tolerance * budget) {
    throw ConvergenceError(fmt::format(
        "frontier: cost {} misses budget {} by more than {:.3g} relative",
        point.achieved_cost, budget, options.relative_tolerance));
  }
  return point;
}

std::vector<FrontierPoint> frontier(double budget, std::span<const double> stds,
                                    const Dependence& dependence,
                                    const ModelSpec& model, std::size_t periods,
                                    std::size_t n, std::uint64_t seed,
                                    const FrontierOptions& options) {
  if (dependence.clayton) dependence.clayton->check_dimension(periods);
  const auto kernel = state_price(n, model, seed);
  const auto copula = draw_copula(n, periods, dependence, seed);
  const auto& market = market_of(model);
  const double discount = std::exp(-market.r * market.horizon);
  std::vector<FrontierPoint> points;
  points.reserve(stds.size());
  for (double s : stds) {
    points.push_back(frontier_point(budget, s, dependence, kernel, copula,
                                    discount, options));
  }
  return points;
}

}  // namespace cec
