#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cec/errors.hpp"
#include "cec/optimizer.hpp"
#include "cec/rng.hpp"
#include "cec/stats.hpp"

using namespace cec;

namespace {

double exhaustive_min(const std::vector<double>& z, const std::vector<double>& xi) {
  std::vector<std::size_t> perm(z.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<double> zp(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zp[i] = z[perm[i]];
    best = std::min(best, cost(zp, xi, false).cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("worked three-point example") {
  const std::vector<double> z{3, 1, 2};
  const std::vector<double> xi{0.5, 0.2, 0.9};
  const auto r = cost(z, xi);
  CHECK(r.cost * 3 == doctest::Approx(2.5));
  CHECK(r.z_star == std::vector<double>{2, 3, 1});
  CHECK(r.cost == doctest::Approx(exhaustive_min(z, xi)));
}

TEST_CASE("rearrangement attains the exhaustive minimum") {
  for (std::uint64_t t = 0; t < 500; ++t) {
    Rng rng(t, Stream::validation, 0);
    const std::size_t n = 1 + t % 7;
    std::vector<double> z(n), xi(n);
    for (auto& v : z) v = t % 3 ? rng.uniform() * 100 : std::floor(rng.uniform() * 3);
    for (auto& v : xi) v = rng.uniform();
    CHECK(cost(z, xi).cost == exhaustive_min(z, xi));
  }
}

TEST_CASE("result invariants") {
  Rng rng(5);
  std::vector<double> z(300), xi(300);
  for (auto& v : z) v = std::floor(rng.uniform() * 20);
  for (auto& v : xi) v = std::floor(rng.uniform() * 10);
  const auto r = cost(z, xi);
  auto p = r.permutation;
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(p[i] == i);
  CHECK(sorted(r.z_star) == sorted(z));
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (std::size_t j = 0; j < xi.size(); ++j) {
      if (xi[i] < xi[j]) REQUIRE(r.z_star[i] >= r.z_star[j]);
    }
  }
}

TEST_CASE("constant kernel keeps the identity") {
  const std::vector<double> z{4, 1, 3, 3, 2};
  const std::vector<double> xi(5, 0.7);
  const auto r = cost(z, xi);
  CHECK(r.permutation == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(r.cost == doctest::Approx(0.7 * 13 / 5.0));
  CHECK(cost(z, xi, false).cost == doctest::Approx(r.cost));
}

TEST_CASE("rearranged cost never exceeds raw cost") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(t, Stream::validation, 1);
    const std::size_t n = 50 + t * 13;
    std::vector<double> z(n), xi(n);
    for (auto& v : z) v = rng.uniform() * 10;
    for (auto& v : xi) v = rng.uniform();
    CHECK(cost(z, xi).cost < cost(z, xi, false).cost);
  }
}

TEST_CASE("size mismatch") {
  const std::vector<double> a{1, 2}, b{1};
  CHECK_THROWS_AS(cost(a, b), SizeMismatch);
  CHECK_THROWS_AS(rearrange_antimonotone(a, b), SizeMismatch);
  CHECK_THROWS_AS(cost(std::vector<double>{}, std::vector<double>{}), SizeMismatch);
}

TEST_CASE("consumption matrix") {
  const auto u = sample(1000, 4, ClaytonParams(2.0), 1);
  const std::vector targets(4, TargetDistribution::constant(5.0));
  const auto m = build_consumption(u, targets);
  for (double s : m.row_sums) CHECK(s == 20.0);
  const std::vector mixed{TargetDistribution::from_mean_std(100, 40),
                          TargetDistribution::constant(1.0),
                          TargetDistribution::from_mean_std(10, 1),
                          TargetDistribution::from_mean_std(50, 5)};
  const auto m2 = build_consumption(u, mixed);
  for (std::size_t i = 0; i < 1000; ++i) {
    CHECK(m2.row_sums[i] == row_sum(m2.values.row(i)));
    CHECK(m2.values(i, 0) == mixed[0].quantile(u.values(i, 0)));
  }
  CHECK(build_consumption(u, mixed).values == m2.values);
  CHECK_THROWS_AS(build_consumption(u, std::vector(3, TargetDistribution::constant(1.0))),
                  SizeMismatch);
}

TEST_CASE("columns follow their targets") {
  const std::size_t n = 100000;
  const auto target = TargetDistribution::from_mean_std(100, 40);
  const auto m = build_consumption(sample(n, 10, ClaytonParams(5.0), 2), std::vector(10, target));
  for (std::size_t k = 0; k < 10; ++k) {
    const auto col = m.values.column(k);
    CHECK(std::abs(mean(col) - 100.0) < 3 * std_error(col));
    CHECK(ks_statistic(col, [&](double x) { return target.cdf(x); }) < ks_critical_1pct(n));
  }
}

TEST_CASE("common row permutation preserves every column multiset") {
  const auto m = build_consumption(sample(200, 3, ClaytonParams(1.0), 1),
                                   std::vector(3, TargetDistribution::from_mean_std(10, 2)));
  const auto k = bs_state_price(200, BsParams{}, 1);
  const auto r = cost(m, k);
  const auto p = m.permuted(r.permutation);
  for (std::size_t c = 0; c < 3; ++c) CHECK(sorted(p.values.column(c)) == sorted(m.values.column(c)));
  CHECK(p.row_sums == r.z_star);
}

TEST_CASE("riskless payoff costs its discounted value") {
  const BsParams market;
  const auto k = bs_state_price(200000, market, 12);
  const std::vector targets{TargetDistribution::constant(100.0)};
  const auto r = efficient_cost(targets, Dependence::independent(), k, 12);
  const double expected = 100.0 * std::exp(-market.r * market.horizon);
  CHECK(std::abs(r.cost - expected) < 4 * r.std_error);
  CHECK(r.cost == doctest::Approx(expected).epsilon(5e-3));
}

TEST_CASE("constant kernel factorizes") {
  StatePriceSample k;
  k.xi.assign(1000, std::exp(-0.2));
  const std::vector targets(3, TargetDistribution::from_mean_std(100, 40));
  const auto m = build_consumption(sample(1000, 3, ClaytonParams(3.0), 1), targets);
  const double mz = std::accumulate(m.row_sums.begin(), m.row_sums.end(), 0.0) / 1000.0;
  CHECK(cost(m, k).cost == doctest::Approx(std::exp(-0.2) * mz).epsilon(1e-12));
  CHECK(cost(m, k, false).cost == doctest::Approx(std::exp(-0.2) * mz).epsilon(1e-12));
}

TEST_CASE("pipeline is deterministic") {
  const std::vector targets(5, TargetDistribution::from_mean_std(100, 40));
  const auto a = efficient_cost(targets, Dependence::clayton_alpha(5), BsParams{}, 5000, 9);
  const auto b = efficient_cost(targets, Dependence::clayton_alpha(5), BsParams{}, 5000, 9);
  CHECK(a == b);
  CHECK_THROWS_AS(efficient_cost(targets, Dependence::clayton_alpha(-0.9), BsParams{}, 10, 1),
                  DomainError);
}

TEST_CASE("cost increases with the per-period mean") {
  const auto k = bs_state_price(20000, BsParams{}, 3);
  double prev = 0.0;
  for (double m : {60.0, 80.0, 100.0, 120.0, 140.0}) {
    const std::vector targets(10, TargetDistribution::from_mean_std(m, 40));
    const double c = efficient_cost(targets, Dependence::clayton_alpha(5), k, 3).cost;
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("frontier point hits the budget with the pipeline's own cost") {
  const std::size_t n = 20000;
  const BsParams market;
  const auto k = bs_state_price(n, market, 4);
  const auto dep = Dependence::clayton_alpha(20);
  const auto u = sample(n, 10, dep, 4);
  const auto p = frontier_point(1000, 40, dep, k, u, std::exp(-0.2));
  CHECK(std::abs(p.achieved_cost - 1000) <= 1e-3 * 1000);
  CHECK(p.iterations <= 60);
  const std::vector targets(10, TargetDistribution::from_mean_std(p.per_period_mean, 40));
  CHECK(efficient_cost(targets, dep, k, 4).cost == p.achieved_cost);

  const std::vector<double> stds{40};
  const auto via_model = frontier(1000, stds, dep, market, 10, n, 4);
  CHECK(via_model.front() == p);
}

TEST_CASE("unbracketed root is reported with the bracket") {
  const auto k = bs_state_price(1000, BsParams{}, 4);
  const auto dep = Dependence::clayton_alpha(5);
  const auto u = sample(1000, 10, dep, 4);
  try {
    frontier_point(1000, 40, dep, k, u, 1e6);
    FAIL("expected RootNotBracketed");
  } catch (const RootNotBracketed& e) {
    CHECK(e.lo() < e.hi());
    CHECK(std::string(e.what()).find("not bracketed") != std::string::npos);
  }
  CHECK_THROWS_AS(frontier_point(-1, 40, dep, k, u, 1.0), DomainError);
  CHECK_THROWS_AS(frontier_point(1000, 0, dep, k, u, 1.0), DomainError);
}

}
