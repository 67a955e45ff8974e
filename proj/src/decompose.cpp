#include "cec/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "cec/errors.hpp"
#include "cec/optimizer.hpp"
#include "cec/rng.hpp"
#include "cec/stats.hpp"

namespace cec {

std::vector<double> distributional_transform(std::span<const double> z,
                                             std::uint64_t seed) {
  const std::size_t n = z.size();
  if (n == 0) throw SizeMismatch("distributional_transform: empty input");
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end());
  const double dn = static_cast<double>(n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), z[i]);
    const auto hi = std::upper_bound(lo, sorted.end(), z[i]);
    const double below = static_cast<double>(lo - sorted.begin()) / dn;
    const double atom = static_cast<double>(hi - lo) / dn;
    Rng rng(seed, Stream::transform, i);
    out[i] = below + rng.uniform() * atom;
  }
  return out;
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw SizeMismatch("empirical_quantile: empty sample");
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError(fmt::format("empirical_quantile: p = {} outside (0, 1]", p));
  }
  const double n = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil(p * n));
  idx = std::clamp<std::size_t>(idx, 1, sorted.size());
  return sorted[idx - 1];
}

ConditionalQuantile::ConditionalQuantile(std::span<const double> x,
                                         std::span<const double> s) {
  if (x.size() != s.size()) throw SizeMismatch("conditional_quantile: length mismatch");
  const std::size_t m = x.size();
  if (m == 0) throw SizeMismatch("conditional_quantile: empty population");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
  s_sorted_.resize(m);
  x_by_s_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s_sorted_[i] = s[order[i]];
    x_by_s_[i] = x[order[i]];
  }
  k_ = std::min<std::size_t>(
      m, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m)))));
}

double ConditionalQuantile::operator()(double s, double v) const {
  const std::size_t m = s_sorted_.size();
  // Grow a window [lo, hi) around the insertion point, nearest side first.
  std::size_t hi = static_cast<std::size_t>(
      std::lower_bound(s_sorted_.begin(), s_sorted_.end(), s) - s_sorted_.begin());
  std::size_t lo = hi;
  while (hi - lo < k_) {
    if (lo == 0) {
      ++hi;
    } else if (hi == m) {
      --lo;
    } else if (s - s_sorted_[lo - 1] <= s_sorted_[hi] - s) {
      --lo;
    } else {
      ++hi;
    }
  }
  if (hi == lo) throw SizeMismatch("conditional_quantile: empty neighborhood");
  std::vector<double> window(x_by_s_.begin() + static_cast<std::ptrdiff_t>(lo),
                             x_by_s_.begin() + static_cast<std::ptrdiff_t>(hi));
  const double n = static_cast<double>(window.size());
  auto idx = static_cast<std::size_t>(std::ceil(v * n));
  idx = std::clamp<std::size_t>(idx, 1, window.size()) - 1;
  std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(idx),
                   window.end());
  return window[idx];
}

double conditional_quantile(const Matrix& population, double s, double v) {
  if (population.cols() != 2) {
    throw SizeMismatch("conditional_quantile: population must have columns (X, S)");
  }
  const auto x = population.column(0);
  const auto sums = population.column(1);
  return ConditionalQuantile(x, sums)(s, v);
}

namespace {

// Doubles mapped to integers in the same order, so bisection can run over
// the representable values between two bounds.
std::int64_t ordered(double x) {
  std::int64_t i;
  std::memcpy(&i, &x, sizeof i);
  return i < 0 ? std::numeric_limits<std::int64_t>::min() - i : i;
}

double from_ordered(std::int64_t i) {
  if (i < 0) i = std::numeric_limits<std::int64_t>::min() - i;
  double x;
  std::memcpy(&x, &i, sizeof x);
  return x;
}

// Sets row[free] so that the left-to-right row sum reproduces target. The
// sum is non-decreasing in row[free], so bracket and bisect.
bool solve_free(std::span<double> row, std::size_t free, double target) {
  auto sum_with = [&](double x) {
    row[free] = x;
    return row_sum(row);
  };
  const double start = row[free];
  if (sum_with(start) == target) return true;
  double lo = start, hi = start;
  double step = std::max(std::abs(start), std::abs(target)) * 0x1.0p-52;
  if (step == 0.0) step = std::numeric_limits<double>::denorm_min();
  for (int i = 0; i < 64 && sum_with(lo) > target; ++i, step *= 2.0) lo = start - step;
  step = std::max(std::abs(start), std::abs(target)) * 0x1.0p-52;
  if (step == 0.0) step = std::numeric_limits<double>::denorm_min();
  for (int i = 0; i < 64 && sum_with(hi) < target; ++i, step *= 2.0) hi = start + step;
  if (sum_with(lo) > target || sum_with(hi) < target) {
    row[free] = start;
    return false;
  }
  std::int64_t a = ordered(lo), b = ordered(hi);
  while (a < b) {
    const std::int64_t mid = a + (b - a) / 2;
    if (sum_with(from_ordered(mid)) < target) {
      a = mid + 1;
    } else {
      b = mid;
    }
  }
  return sum_with(from_ordered(a)) == target;
}

// Round-to-even can make the target unreachable through row[free] alone
// (the partial sum lands on a tie); then shift an earlier entry by an ulp or
// two and retry.
bool make_sum_exact(std::span<double> row, std::size_t free, double target) {
  if (solve_free(row, free, target)) return true;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = free; k-- > 0;) {
    const double original = row[k];
    for (int ulps = 1; ulps <= 2; ++ulps) {
      for (double dir : {inf, -inf}) {
        double x = original;
        for (int u = 0; u < ulps; ++u) x = std::nextafter(x, dir);
        row[k] = x;
        if (solve_free(row, free, target)) return true;
      }
    }
    row[k] = original;
  }
  return false;
}

}  // namespace

AllocationResult allocate(const Matrix& population,
                          std::span<const double> z_tilde, std::uint64_t seed) {
  const std::size_t m = population.rows();
  const std::size_t periods = population.cols();
  if (m == 0 || periods == 0) throw SizeMismatch("allocate: empty population");
  const std::size_t rows = z_tilde.size();

  AllocationResult out;
  out.values = Matrix(rows, periods);
  out.z_tilde.assign(z_tilde.begin(), z_tilde.end());
  out.uniforms_used = Matrix(rows, periods);
  out.remainders = Matrix(rows, periods);

  // Suffix sums of the population: suffix[k] = X_{k+1} + ... + X_N.
  std::vector<std::vector<double>> suffix(periods, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t k = periods; k-- > 0;) {
      acc += population(i, k);
      suffix[k][i] = acc;
    }
  }
  std::vector<double> population_sums(m);
  for (std::size_t i = 0; i < m; ++i) population_sums[i] = row_sum(population.row(i));

  if (rows > 0) {
    out.ks_sum_statistic = ks_two_sample(z_tilde, population_sums);
    out.ks_sum_critical = ks_critical_1pct(rows, m);
    if (out.ks_sum_statistic > out.ks_sum_critical) {
      out.warnings.push_back(fmt::format(
          "z_tilde does not look like the population row sums (KS {:.4g} > {:.4g})",
          out.ks_sum_statistic, out.ks_sum_critical));
    }
  }

  // Chain step j draws column j given that columns j..N-1 sum to the
  // current remainder.
  std::vector<ConditionalQuantile> steps;
  steps.reserve(periods - 1);
  for (std::size_t j = 0; j + 1 < periods; ++j) {
    steps.emplace_back(population.column(j), suffix[j]);
  }

  const auto u_transform = rows > 0 ? distributional_transform(z_tilde, seed)
                                    : std::vector<double>{};
  std::size_t inexact = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    Rng rng(seed, Stream::allocation, i);
    auto row = out.values.row(i);
    out.uniforms_used(i, 0) = u_transform[i];
    double remainder = z_tilde[i];
    out.remainders(i, 0) = remainder;
    for (std::size_t j = 0; j + 1 < periods; ++j) {
      const double v = rng.uniform();
      out.uniforms_used(i, j + 1) = v;
      const double x = steps[j](remainder, v);
      row[j] = x;
      remainder -= x;
      out.remainders(i, j + 1) = remainder;
    }
    row[periods - 1] = remainder;
    if (!make_sum_exact(row, periods - 1, z_tilde[i])) ++inexact;
  }
  if (inexact > 0) {
    out.warnings.push_back(
        fmt::format("{} rows could not be made to sum exactly", inexact));
  }
  return out;
}

}  // namespace cec
