#include "cec/targetdist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cec/errors.hpp"
#include "cec/normal.hpp"

namespace cec {

TargetDistribution TargetDistribution::from_mean_std(double mean, double std) {
  if (!(mean > 0.0) || !(std > 0.0) || !std::isfinite(mean) ||
      !std::isfinite(std)) {
    throw DomainError(fmt::format(
        "lognormal target needs mean > 0 and std > 0, got mean={}, std={}",
        mean, std));
  }
  TargetDistribution d;
  d.kind_ = Kind::lognormal_moments;
  const double ratio = std / mean;
  d.log_v_ = std::sqrt(std::log1p(ratio * ratio));
  d.log_m_ = std::log(mean) - 0.5 * d.log_v_ * d.log_v_;
  return d;
}

TargetDistribution TargetDistribution::from_log_params(double log_m,
                                                       double log_v) {
  if (!std::isfinite(log_m) || !(log_v > 0.0) || !std::isfinite(log_v)) {
    throw DomainError(fmt::format(
        "lognormal target needs finite log_m and log_v > 0, got {}, {}", log_m,
        log_v));
  }
  TargetDistribution d;
  d.kind_ = Kind::lognormal_logparams;
  d.log_m_ = log_m;
  d.log_v_ = log_v;
  return d;
}

TargetDistribution TargetDistribution::empirical(std::vector<double> points) {
  if (points.empty()) throw DomainError("empirical target needs support points");
  for (double x : points) {
    if (!std::isfinite(x)) throw DomainError("empirical target: non-finite point");
  }
  std::sort(points.begin(), points.end());
  TargetDistribution d;
  d.kind_ = Kind::empirical;
  d.points_ = std::move(points);
  return d;
}

double TargetDistribution::log_m() const {
  if (!is_lognormal()) throw DomainError("log_m: not a lognormal target");
  return log_m_;
}

double TargetDistribution::log_v() const {
  if (!is_lognormal()) throw DomainError("log_v: not a lognormal target");
  return log_v_;
}

double TargetDistribution::mean() const {
  if (is_lognormal()) return std::exp(log_m_ + 0.5 * log_v_ * log_v_);
  return std::accumulate(points_.begin(), points_.end(), 0.0) /
         static_cast<double>(points_.size());
}

double TargetDistribution::std() const {
  if (is_lognormal()) {
    const double v2 = log_v_ * log_v_;
    return std::sqrt(std::expm1(v2)) * std::exp(log_m_ + 0.5 * v2);
  }
  const double m = mean();
  double ss = 0.0;
  for (double x : points_) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(points_.size()));
}

double TargetDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(fmt::format("quantile: p must lie in (0, 1), got {}", p));
  }
  if (is_lognormal()) return std::exp(log_m_ + log_v_ * norm_quantile(p));
  const auto n = points_.size();
  auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n);
  return points_[k - 1];
}

double TargetDistribution::cdf(double x) const {
  if (is_lognormal()) {
    if (!(x > 0.0)) return 0.0;
    return norm_cdf((std::log(x) - log_m_) / log_v_);
  }
  const auto it = std::upper_bound(points_.begin(), points_.end(), x);
  return static_cast<double>(it - points_.begin()) /
         static_cast<double>(points_.size());
}

}  // namespace cec
