#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cec/copula.hpp"
#include "cec/errors.hpp"
#include "cec/stats.hpp"
#include "support.hpp"

using namespace cec;

TEST_SUITE("copula") {

TEST_CASE("alpha admissibility") {
  CHECK_THROWS_AS(ClaytonParams(0.0), DomainError);
  CHECK_THROWS_AS(ClaytonParams(-1.5), DomainError);
  CHECK_THROWS_AS(ClaytonParams(std::nan("")), DomainError);
  CHECK_NOTHROW(ClaytonParams(-1.0));
  CHECK_NOTHROW(ClaytonParams(-0.9).check_dimension(2));
  CHECK_THROWS_AS(ClaytonParams(-0.9).check_dimension(10), DomainError);
  CHECK_NOTHROW(ClaytonParams(-1.0 / 9.0).check_dimension(10));
  CHECK_THROWS_AS(sample(10, 10, ClaytonParams(-0.9), 1), DomainError);
  try {
    ClaytonParams bad(0.0);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("alpha") != std::string::npos);
  }
}

TEST_CASE("generator round trip") {
  for (double alpha : {-1.0, -0.5, -0.1, 0.3, 1.0, 5.0, 20.0}) {
    const ClaytonParams p(alpha);
    for (int i = 1; i < 100; ++i) {
      const double u = i / 100.0;
      CHECK(std::abs(inverse_generator(generator(u, p), p) - u) <= 1e-12);
    }
  }
}

TEST_CASE("generator derivatives match finite differences") {
  for (double alpha : {0.5, 1.0, 5.0, 20.0}) {
    const ClaytonParams p(alpha);
    for (double t : {0.05, 0.3, 1.0, 2.5}) {
      const double h = 1e-3 * std::max(t, 0.1);
      auto f = [&](double x) { return inverse_generator(x, p); };
      const double d1 = (f(t + h) - f(t - h)) / (2 * h);
      const double d2 = (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
      const double d3 = (f(t + 2 * h) - 2 * f(t + h) + 2 * f(t - h) - f(t - 2 * h)) / (2 * h * h * h);
      CHECK(inverse_generator_derivative(t, p, 1) == doctest::Approx(d1).epsilon(1e-4));
      CHECK(inverse_generator_derivative(t, p, 2) == doctest::Approx(d2).epsilon(1e-4));
      CHECK(inverse_generator_derivative(t, p, 3) == doctest::Approx(d3).epsilon(1e-4));
    }
  }
}

TEST_CASE("radial cdf matches the bivariate closed form") {
  for (double alpha : {-0.5, 1.0, 5.0}) {
    const ClaytonParams p(alpha);
    for (int i = 1; i < 50; ++i) {
      const double v = i / 50.0;
      const double expected = v + v * (1.0 - std::pow(v, alpha)) / alpha;
      CHECK(radial_cdf(v, p, 2) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("radial cdf matches the derivative series") {
  // sum_k (-1)^k phi^k / k! psi^(k)(phi), psi^(k) written out independently.
  for (double alpha : {1.0, 5.0}) {
    for (std::size_t periods : {3u, 6u, 10u}) {
      const ClaytonParams p(alpha);
      for (double v : {0.05, 0.2, 0.5, 0.9}) {
        const long double phi = (std::pow((long double)v, -alpha) - 1.0L) / alpha;
        long double sum = 0.0L, fact = 1.0L, prod = 1.0L;
        for (std::size_t k = 0; k < periods; ++k) {
          if (k > 0) {
            fact *= k;
            prod *= 1.0L + (k - 1) * alpha;
          }
          sum += std::pow(phi, (long double)k) / fact * prod *
                 std::pow(1.0L + alpha * phi, -1.0L / alpha - k);
        }
        CHECK(radial_cdf(v, p, periods) == doctest::Approx((double)sum).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("radial cdf agrees with frailty-sampled copula values") {
  const std::size_t n = 20000;
  for (double alpha : {1.0, 5.0}) {
    const ClaytonParams p(alpha);
    const auto u = testing::marshall_olkin(n, 4, alpha, 11);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = copula_cdf(u.row(i), p);
    const double d = ks_statistic(c, [&](double v) { return radial_cdf(v, p, 4); });
    CHECK(d < ks_critical_1pct(n));
  }
}

TEST_CASE("radial cdf is stable for large alpha") {
  const ClaytonParams p(20.0);
  double prev = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double v = i / 1000.0;
    const double f = radial_cdf(v, p, 10);
    REQUIRE(std::isfinite(f));
    CHECK(f >= prev);
    CHECK(f <= 1.0 + 1e-12);
    prev = f;
  }
  CHECK(radial_cdf(1.0, p, 10) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("radial quantile inverts the cdf") {
  for (double alpha : {1.0, 5.0, 20.0}) {
    const ClaytonParams p(alpha);
    for (double w : {0.01, 0.1, 0.5, 0.9, 0.99}) {
      const double v = radial_quantile(w, p, 10);
      CHECK(std::abs(radial_cdf(v, p, 10) - w) <= 1e-9);
    }
  }
}

TEST_CASE("copula cdf is 2-increasing") {
  const ClaytonParams p(3.0);
  const int g = 12;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double a1 = (i + 0.5) / g, a2 = (i + 1.5) / g;
      const double b1 = (j + 0.5) / g, b2 = (j + 1.5) / g;
      if (a2 >= 1 || b2 >= 1) continue;
      auto c = [&](double x, double y) {
        const double pt[] = {x, y, 0.7};
        return copula_cdf(pt, p);
      };
      CHECK(c(a2, b2) - c(a1, b2) - c(a2, b1) + c(a1, b1) >= -1e-15);
    }
  }
}

TEST_CASE("marginals are uniform") {
  const std::size_t n = 100000;
  const auto u = sample(n, 10, ClaytonParams(5.0), 20240501);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto col = u.values.column(k);
    CHECK(ks_statistic(col, [](double x) { return x; }) < ks_critical_1pct(n));
    for (double x : col) REQUIRE((x > 0.0 && x < 1.0));
  }
}

TEST_CASE("Kendall tau matches alpha / (alpha + 2)") {
  const std::size_t n = 20000;
  for (double alpha : {1.0, 5.0, 20.0}) {
    const auto u = sample(n, 5, ClaytonParams(alpha), 99);
    const double tau = kendall_tau(u.values.column(1), u.values.column(4));
    CHECK(std::abs(tau - alpha / (alpha + 2.0)) < 0.02);
  }
  const auto neg = sample(n, 2, ClaytonParams(-0.5), 99);
  CHECK(std::abs(kendall_tau(neg.values.column(0), neg.values.column(1)) + 1.0 / 3.0) < 0.02);
}

TEST_CASE("coordinates are exchangeable") {
  const std::size_t n = 20000;
  const auto u = sample(n, 6, ClaytonParams(5.0), 5);
  std::vector<double> taus;
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = a + 1; b < 6; ++b) {
      taus.push_back(kendall_tau(u.values.column(a), u.values.column(b)));
    }
  }
  const auto [lo, hi] = std::minmax_element(taus.begin(), taus.end());
  CHECK(*hi - *lo < 0.02);
}

TEST_CASE("sampler agrees with the frailty construction") {
  const std::size_t n = 20000;
  const ClaytonParams p(5.0);
  const auto ours = sample(n, 3, p, 3);
  const auto theirs = testing::marshall_olkin(n, 3, 5.0, 4);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = copula_cdf(ours.values.row(i), p);
    b[i] = copula_cdf(theirs.row(i), p);
  }
  CHECK(ks_two_sample(a, b) < ks_critical_1pct(n, n));
}

TEST_CASE("sampling is deterministic and order independent") {
  const auto a = sample(500, 4, ClaytonParams(2.0), 17);
  const auto b = sample(500, 4, ClaytonParams(2.0), 17);
  CHECK(a.values == b.values);
  const auto head = sample(100, 4, ClaytonParams(2.0), 17);
  for (std::size_t i = 0; i < 100; ++i) {
    for (std::size_t k = 0; k < 4; ++k) CHECK(head.values(i, k) == a.values(i, k));
  }
  CHECK_FALSE(sample(500, 4, ClaytonParams(2.0), 18).values == a.values);
}

TEST_CASE("independent mode") {
  const std::size_t n = 20000;
  const auto u = sample(n, 3, Dependence::independent(), 8);
  CHECK(u.dependence.is_independent());
  CHECK(std::abs(kendall_tau(u.values.column(0), u.values.column(2))) < 0.02);
  CHECK_THROWS_AS(sample(10, 1, ClaytonParams(2.0), 1), DomainError);
}

}
