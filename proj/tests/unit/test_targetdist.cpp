#include <doctest.h>

#include <cmath>

#include "cec/errors.hpp"
#include "cec/targetdist.hpp"
#include "support.hpp"

using namespace cec;

TEST_SUITE("targetdist") {

TEST_CASE("lognormal from mean and std reproduces both moments") {
  for (auto [m, s] : {std::pair{100.0, 40.0}, std::pair{100.0, 10.0}, std::pair{3.0, 5.0}}) {
    const auto d = TargetDistribution::from_mean_std(m, s);
    // Moments by integrating the quantile over p (substitution p = Phi(x)).
    const double lm = d.log_m(), lv = d.log_v();
    auto density = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); };
    const double mean = testing::simpson(
        [&](double x) { return std::exp(lm + lv * x) * density(x); }, -12, 12, 20000);
    const double second = testing::simpson(
        [&](double x) { return std::exp(2 * (lm + lv * x)) * density(x); }, -14, 14, 40000);
    CHECK(mean == doctest::Approx(m).epsilon(1e-8));
    CHECK(std::sqrt(second - mean * mean) == doctest::Approx(s).epsilon(1e-6));
    CHECK(d.mean() == doctest::Approx(m).epsilon(1e-12));
    CHECK(d.std() == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("quantile and cdf are inverse") {
  const auto d = TargetDistribution::from_mean_std(100.0, 40.0);
  for (int i = 1; i < 100; ++i) {
    const double p = i / 100.0;
    CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(d.cdf(0.0) == 0.0);
  CHECK(d.cdf(-5.0) == 0.0);
  CHECK(d.quantile(0.5) == doctest::Approx(std::exp(d.log_m())).epsilon(1e-14));
}

TEST_CASE("log parameters") {
  const auto d = TargetDistribution::from_log_params(1.0, 0.5);
  CHECK(d.mean() == doctest::Approx(std::exp(1.0 + 0.125)));
  CHECK_THROWS_AS(TargetDistribution::from_log_params(1.0, 0.0), DomainError);
}

TEST_CASE("empirical and constant targets") {
  const auto d = TargetDistribution::empirical({3.0, 1.0, 2.0, 2.0});
  CHECK(d.quantile(0.1) == 1.0);
  CHECK(d.quantile(0.25) == 1.0);
  CHECK(d.quantile(0.26) == 2.0);
  CHECK(d.quantile(0.75) == 2.0);
  CHECK(d.quantile(0.76) == 3.0);
  CHECK(d.cdf(0.5) == 0.0);
  CHECK(d.cdf(2.0) == 0.75);
  CHECK(d.cdf(3.0) == 1.0);
  const auto c = TargetDistribution::constant(7.0);
  CHECK(c.quantile(0.001) == 7.0);
  CHECK(c.quantile(0.999) == 7.0);
  CHECK(c.mean() == 7.0);
  CHECK(c.std() == 0.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(TargetDistribution::from_mean_std(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(TargetDistribution::from_mean_std(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(TargetDistribution::empirical({}), DomainError);
  const auto d = TargetDistribution::from_mean_std(1.0, 1.0);
  CHECK_THROWS_AS(d.quantile(0.0), DomainError);
  CHECK_THROWS_AS(d.quantile(1.0), DomainError);
}

}
