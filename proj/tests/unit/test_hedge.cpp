#include <doctest.h>

#include <cmath>

#include "cec/errors.hpp"
#include "cec/hedge.hpp"
#include "cec/rng.hpp"
#include "cec/stats.hpp"

using namespace cec;

namespace {

const BsParams kMarket{};
const auto kTarget = TargetDistribution::from_mean_std(100, 40);

}  // namespace

TEST_SUITE("hedge") {

TEST_CASE("closed form agrees with quantile composition") {
  const auto hp = LognormalHedgeParams::make(kTarget, kMarket);
  const auto law = TerminalLaw::of(kMarket);
  for (int i = 0; i < 1000; ++i) {
    const double z = -3.5 + 7.0 * i / 999.0;
    const double s = std::exp(law.log_mean + law.log_sd * z);
    CHECK(target_payoff(s, kTarget, kMarket) == doctest::Approx(hp.payoff(s)).epsilon(1e-9));
  }
}

TEST_CASE("payoff edge cases") {
  const auto law = TerminalLaw::of(kMarket);
  const double median = std::exp(law.log_mean);
  CHECK(target_payoff(median, kTarget, kMarket) ==
        doctest::Approx(kTarget.quantile(0.5)).epsilon(1e-12));
  const auto c = TargetDistribution::constant(42.0);
  for (double s : {0.01, 1.0, 50.0}) CHECK(target_payoff(s, c, kMarket) == 42.0);
  BsParams flat = kMarket;
  flat.mu = flat.r;
  CHECK_THROWS_AS(target_payoff(1.0, kTarget, flat), UnsupportedRegime);
  CHECK_THROWS_AS(LognormalHedgeParams::make(kTarget, flat), UnsupportedRegime);
  CHECK_THROWS_AS(target_payoff(0.0, kTarget, kMarket), DomainError);
}

TEST_CASE("unit elasticity is a pure stock position") {
  const auto law = TerminalLaw::of(kMarket);
  const auto hp = LognormalHedgeParams::make(law.log_mean, law.log_sd, kMarket);
  CHECK(hp.sigma_prime == doctest::Approx(1.0));
  CHECK(hp.b == doctest::Approx(1.0));
  for (double t : {0.0, 3.0, 9.9}) {
    const auto p = hedge_positions(t, 1.3, hp);
    CHECK(p.psi == doctest::Approx(0.0));
    CHECK(p.delta == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("positions recombine to the price process") {
  const auto hp = LognormalHedgeParams::make(kTarget, kMarket);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform() * kMarket.horizon * 0.999;
    const double s = 0.2 + rng.uniform() * 4.0;
    const auto p = hedge_positions(t, s, hp);
    const double value = p.delta * s + p.psi * std::exp(kMarket.r * t);
    CHECK(value == doctest::Approx(hp.value(t, s)).epsilon(1e-12));
    CHECK(value > 0.0);
  }
  CHECK_THROWS_AS(hedge_positions(kMarket.horizon, 1.0, hp), DomainError);
  CHECK_THROWS_AS(hedge_positions(-0.1, 1.0, hp), DomainError);
}

TEST_CASE("price process ends at the payoff") {
  const auto hp = LognormalHedgeParams::make(kTarget, kMarket);
  CHECK(hp.g(kMarket.horizon) == 1.0);
  for (double s : {0.3, 1.0, 2.7}) {
    CHECK(hp.value(kMarket.horizon, s) == doctest::Approx(hp.payoff(s)).epsilon(1e-14));
    CHECK(hp.value(kMarket.horizon - 1e-9, s) == doctest::Approx(hp.payoff(s)).epsilon(1e-8));
  }
}

TEST_CASE("price process is a discounted risk-neutral expectation") {
  // E_t = e^{-r(T-t)} E^Q[b S_T^{sigma'} | S_t = s], by quadrature over the
  // risk-neutral log-return.
  const auto hp = LognormalHedgeParams::make(kTarget, kMarket);
  const double t = 4.0, s = 1.2, tau = kMarket.horizon - t;
  const double m = std::log(s) + (kMarket.r - 0.5 * kMarket.sigma * kMarket.sigma) * tau;
  const double sd = kMarket.sigma * std::sqrt(tau);
  double sum = 0.0;
  const int panels = 20000;
  const double h = 20.0 / panels;
  for (int i = 0; i <= panels; ++i) {
    const double z = -10.0 + i * h;
    const double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
    sum += w * hp.payoff(std::exp(m + sd * z)) * std::exp(-0.5 * z * z);
  }
  const double expected = std::exp(-kMarket.r * tau) * sum * h / 3.0 / std::sqrt(2 * M_PI);
  CHECK(hp.value(t, s) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("initial capital equals the Monte Carlo price") {
  const auto hp = LognormalHedgeParams::make(kTarget, kMarket);
  const auto k = bs_state_price(1000000, kMarket, 21);
  std::vector<double> priced(k.xi.size());
  for (std::size_t i = 0; i < priced.size(); ++i) priced[i] = k.xi[i] * hp.payoff(k.terminal_price[i]);
  CHECK(std::abs(mean(priced) - hp.value(0.0, kMarket.s0)) < 3 * std_error(priced));
}

TEST_CASE("self-financing along a path") {
  const auto hp = LognormalHedgeParams::make(kTarget, kMarket);
  const auto paths = lognormal_paths(3, 64, kMarket, 5);
  const auto run = simulate_hedge(paths.row(0), hp, 16);
  REQUIRE(run.states.size() == 17);
  CHECK(run.states.front().portfolio_value == doctest::Approx(hp.value(0, kMarket.s0)));
  for (std::size_t j = 0; j + 1 < run.states.size(); ++j) {
    const auto& st = run.states[j];
    CHECK(st.portfolio_value ==
          doctest::Approx(st.delta * st.stock_price + st.psi * st.bond_price).epsilon(1e-12));
    // Entering the next date with the old holdings gives the next value.
    const auto& nx = run.states[j + 1];
    CHECK(nx.portfolio_value ==
          doctest::Approx(st.delta * nx.stock_price + st.psi * nx.bond_price).epsilon(1e-12));
  }
  CHECK(run.error == doctest::Approx(run.terminal_value - run.payoff));
}

TEST_CASE("grid compatibility") {
  const auto hp = LognormalHedgeParams::make(kTarget, kMarket);
  const auto paths = lognormal_paths(1, 64, kMarket, 5);
  CHECK_THROWS_AS(simulate_hedge(paths.row(0), hp, 48), SizeMismatch);
  CHECK_THROWS_AS(simulate_hedge(paths.row(0), hp, 0), SizeMismatch);
  const std::size_t bad[] = {3};
  CHECK_THROWS_AS(hedge_experiment(kTarget, kMarket, bad, 10, 64, 1), SizeMismatch);
}

TEST_CASE("riskless target is replicated by bonds") {
  const auto hp = LognormalHedgeParams::make(std::log(100.0), 0.0, kMarket);
  const auto paths = lognormal_paths(20, 32, kMarket, 6);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto run = simulate_hedge(paths.row(i), hp, 8);
    CHECK(run.states.front().delta == 0.0);
    CHECK(std::abs(run.error) <= 1e-10);
  }
}

TEST_CASE("tracking error falls with rebalancing frequency") {
  const std::size_t reb[] = {32, 128, 512};
  const auto res = hedge_experiment(kTarget, kMarket, reb, 2000, 512, 9);
  CHECK(res[1].rms_error < res[0].rms_error);
  CHECK(res[2].rms_error < res[1].rms_error);
  CHECK(res[2].rms_error < 0.5 * res[0].rms_error);
}

TEST_CASE("exact paths have the lognormal law") {
  const auto paths = lognormal_paths(20000, 8, kMarket, 10);
  const auto law = TerminalLaw::of(kMarket);
  const auto last = paths.column(8);
  CHECK(ks_statistic(last, [&](double s) { return law.cdf(s); }) < ks_critical_1pct(last.size()));
}

}
