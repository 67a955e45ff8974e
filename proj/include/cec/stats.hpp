#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace cec {

/// sup |F_n - F| of the sample against a continuous CDF.
double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance sup |F_n - G_m|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic 1% critical values (c = 1.628).
double ks_critical_1pct(std::size_t n);
double ks_critical_1pct(std::size_t n, std::size_t m);

/// Kendall's tau-b by Knight's merge-sort algorithm, O(n log n).
double kendall_tau(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double sample_std(std::span<const double> x);
/// Standard error of the mean.
double std_error(std::span<const double> x);

}  // namespace cec
