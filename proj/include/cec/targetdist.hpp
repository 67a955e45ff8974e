#pragma once

#include <vector>

namespace cec {

/// Per-period consumption law, given by a CDF/quantile pair.
///
/// The lognormal kinds are the workhorse. `from_mean_std` takes the
/// distribution's own mean and standard deviation, not the log-scale
/// parameters; `from_log_params` takes those directly. The empirical kind is a
/// step CDF on a finite support (a single point gives a constant payoff).
class TargetDistribution {
 public:
  enum class Kind { lognormal_moments, lognormal_logparams, empirical };

  static TargetDistribution from_mean_std(double mean, double std);
  static TargetDistribution from_log_params(double log_m, double log_v);
  static TargetDistribution empirical(std::vector<double> sample_points);
  static TargetDistribution constant(double value) { return empirical({value}); }

  Kind kind() const noexcept { return kind_; }
  bool is_lognormal() const noexcept { return kind_ != Kind::empirical; }

  double log_m() const;
  double log_v() const;
  double mean() const;
  double std() const;
  const std::vector<double>& sample_points() const noexcept { return points_; }

  /// Generalized inverse of cdf. Domain error unless 0 < p < 1.
  double quantile(double p) const;
  /// Right-continuous, non-decreasing.
  double cdf(double x) const;

 private:
  TargetDistribution() = default;

  Kind kind_ = Kind::lognormal_logparams;
  double log_m_ = 0.0;
  double log_v_ = 1.0;
  std::vector<double> points_;
};

}  // namespace cec
