#include "cec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cec/errors.hpp"

namespace cec {

namespace {

constexpr double kKs1pct = 1.628;

void require_nonempty(std::span<const double> x, const char* what) {
  if (x.empty()) throw SizeMismatch(std::string(what) + ": empty sample");
}

// Counts pairs (i < j) with v[i] > v[j] while sorting v in place.
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

// Sum of t(t-1)/2 over runs of equal values in a sorted range.
template <class Eq>
std::uint64_t tied_pairs(std::size_t n, Eq eq) {
  std::uint64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && eq(i - 1, i)) {
      ++run;
    } else {
      total += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

}  // namespace

double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf) {
  require_nonempty(sample, "ks_statistic");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "ks_two_sample");
  require_nonempty(b, "ks_two_sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_critical_1pct(std::size_t n) {
  return kKs1pct / std::sqrt(static_cast<double>(n));
}

double ks_critical_1pct(std::size_t n, std::size_t m) {
  const double a = static_cast<double>(n);
  const double b = static_cast<double>(m);
  return kKs1pct * std::sqrt((a + b) / (a * b));
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw SizeMismatch("kendall_tau: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw SizeMismatch("kendall_tau: need at least two points");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
  const std::uint64_t n3 = tied_pairs(n, [&](std::size_t a, std::size_t b) {
    return xs[a] == xs[b] && ys[a] == ys[b];
  });
  std::vector<double> buf(n);
  const std::uint64_t swaps = merge_count(ys, buf, 0, n);
  const std::uint64_t n2 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

  const double numerator = static_cast<double>(n0) - static_cast<double>(n1) -
                           static_cast<double>(n2) + static_cast<double>(n3) -
                           2.0 * static_cast<double>(swaps);
  const double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                       std::sqrt(static_cast<double>(n0 - n2));
  if (denom == 0.0) return 0.0;
  return numerator / denom;
}

double mean(std::span<const double> x) {
  require_nonempty(x, "mean");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double std_error(std::span<const double> x) {
  return sample_std(x) / std::sqrt(static_cast<double>(x.size()));
}

}  // namespace cec
