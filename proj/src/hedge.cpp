#include "cec/hedge.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cec/errors.hpp"
#include "cec/normal.hpp"
#include "cec/rng.hpp"

namespace cec {

namespace {

void require_positive_theta(const BsParams& market) {
  if (!(market.theta() > 0.0)) {
    throw UnsupportedRegime(fmt::format(
        "hedge requires mu > r (theta > 0); got mu = {}, r = {}", market.mu, market.r));
  }
}

}  // namespace

TerminalLaw TerminalLaw::of(const BsParams& m) {
  return {std::log(m.s0) + (m.mu - 0.5 * m.sigma * m.sigma) * m.horizon,
          m.sigma * std::sqrt(m.horizon)};
}

double TerminalLaw::cdf(double s) const {
  if (!(s > 0.0)) return 0.0;
  return norm_cdf((std::log(s) - log_mean) / log_sd);
}

LognormalHedgeParams LognormalHedgeParams::make(double log_m, double log_v,
                                                const BsParams& market) {
  market.validate();
  require_positive_theta(market);
  if (!(log_v >= 0.0)) throw DomainError("sigma_log must be >= 0");
  const auto law = TerminalLaw::of(market);
  LognormalHedgeParams hp;
  hp.market = market;
  hp.sigma_prime = log_v / law.log_sd;
  hp.b = std::exp(log_m - hp.sigma_prime * law.log_mean);
  return hp;
}

LognormalHedgeParams LognormalHedgeParams::make(const TargetDistribution& target,
                                                const BsParams& market) {
  if (!target.is_lognormal()) throw DomainError("closed-form hedge needs a lognormal target");
  return make(target.log_m(), target.log_v(), market);
}

double LognormalHedgeParams::g(double t) const {
  const double s2 = market.sigma * market.sigma;
  const double sp = sigma_prime;
  return std::exp((sp * (market.r - 0.5 * s2) + 0.5 * sp * sp * s2) *
                  (market.horizon - t));
}

double LognormalHedgeParams::payoff(double s_T) const {
  return b * std::pow(s_T, sigma_prime);
}

double LognormalHedgeParams::value(double t, double s) const {
  return std::exp(-market.r * (market.horizon - t)) * b * std::pow(s, sigma_prime) * g(t);
}

double target_payoff(double s_T, const TargetDistribution& target,
                     const BsParams& market) {
  market.validate();
  require_positive_theta(market);
  if (!(s_T > 0.0)) throw DomainError(fmt::format("s_T must be > 0, got {}", s_T));
  const double p = TerminalLaw::of(market).cdf(s_T);
  if (target.kind() == TargetDistribution::Kind::empirical &&
      target.sample_points().size() == 1) {
    return target.sample_points().front();
  }
  return target.quantile(p);
}

Positions hedge_positions(double t, double s, const LognormalHedgeParams& hp) {
  if (!(t >= 0.0 && t < hp.market.horizon)) {
    throw DomainError(fmt::format("hedge_positions: t = {} outside [0, {})", t,
                                  hp.market.horizon));
  }
  if (!(s > 0.0)) throw DomainError("hedge_positions: stock price must be > 0");
  const double e = hp.value(t, s);
  return {hp.sigma_prime * e / s,
          (1.0 - hp.sigma_prime) * e / std::exp(hp.market.r * t)};
}

HedgeRun simulate_hedge(std::span<const double> path, const LognormalHedgeParams& hp,
                        std::size_t rebalance_steps) {
  if (path.size() < 2) throw SizeMismatch("simulate_hedge: path needs at least two points");
  const std::size_t grid = path.size() - 1;
  if (rebalance_steps == 0 || grid % rebalance_steps != 0) {
    throw SizeMismatch(fmt::format(
        "simulate_hedge: {} rebalances do not divide a {}-step path grid",
        rebalance_steps, grid));
  }
  const std::size_t stride = grid / rebalance_steps;
  const double T = hp.market.horizon;
  const double r = hp.market.r;
  const double dt = T / static_cast<double>(grid);

  HedgeRun run;
  run.states.reserve(rebalance_steps + 1);
  double value = hp.value(0.0, path[0]);
  for (std::size_t j = 0; j < rebalance_steps; ++j) {
    const std::size_t idx = j * stride;
    const double t = static_cast<double>(idx) * dt;
    const double bond = std::exp(r * t);
    if (j > 0) {
      const auto& prev = run.states.back();
      value = prev.delta * path[idx] + prev.psi * bond;
    }
    const double delta = hedge_positions(t, path[idx], hp).delta;
    const double psi = (value - delta * path[idx]) / bond;
    run.states.push_back({t, delta, psi, path[idx], bond, value});
  }
  const auto& last = run.states.back();
  const double bond_T = std::exp(r * T);
  run.terminal_value = last.delta * path[grid] + last.psi * bond_T;
  run.states.push_back({T, last.delta, last.psi, path[grid], bond_T, run.terminal_value});
  run.payoff = hp.payoff(path[grid]);
  run.error = run.terminal_value - run.payoff;
  return run;
}

Matrix lognormal_paths(std::size_t n, std::size_t steps, const BsParams& market,
                       std::uint64_t seed) {
  market.validate();
  if (steps == 0) throw DomainError("lognormal_paths: need at least one step");
  const double dt = market.horizon / static_cast<double>(steps);
  const double drift = (market.mu - 0.5 * market.sigma * market.sigma) * dt;
  const double vol = market.sigma * std::sqrt(dt);
  Matrix paths(n, steps + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, Stream::hedge, i);
    double log_s = std::log(market.s0);
    paths(i, 0) = market.s0;
    for (std::size_t k = 1; k <= steps; ++k) {
      log_s += drift + vol * norm_quantile(rng.uniform());
      paths(i, k) = std::exp(log_s);
    }
  }
  return paths;
}

std::vector<HedgeExperiment> hedge_experiment(const TargetDistribution& target,
                                              const BsParams& market,
                                              std::span<const std::size_t> rebalances,
                                              std::size_t n, std::size_t grid_steps,
                                              std::uint64_t seed) {
  const auto hp = LognormalHedgeParams::make(target, market);
  for (auto k : rebalances) {
    if (k == 0 || grid_steps % k != 0) {
      throw SizeMismatch(fmt::format(
          "hedge_experiment: {} rebalances do not divide {} grid steps", k, grid_steps));
    }
  }
  const auto paths = lognormal_paths(n, grid_steps, market, seed);
  std::vector<HedgeExperiment> out;
  for (auto k : rebalances) {
    double ss = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = simulate_hedge(paths.row(i), hp, k).error;
      ss += e * e;
      sum += e;
    }
    out.push_back({k, std::sqrt(ss / static_cast<double>(n)),
                   sum / static_cast<double>(n)});
  }
  return out;
}

}  // namespace cec
