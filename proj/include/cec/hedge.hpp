#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cec/market.hpp"
#include "cec/matrix.hpp"
#include "cec/targetdist.hpp"

namespace cec {

/// Law of S_T under the physical measure: log S_T ~ N(mean, sd^2).
struct TerminalLaw {
  double log_mean = 0.0;
  double log_sd = 0.0;
  static TerminalLaw of(const BsParams& market);
  double cdf(double s) const;
};

/// Closed form of the cost-efficient payoff b S_T^{sigma'} for a lognormal
/// target, and of its price process E_t = e^{-r(T-t)} b S_t^{sigma'} G(t).
struct LognormalHedgeParams {
  double b = 0.0;
  double sigma_prime = 0.0;
  BsParams market;

  /// The target's log-scale parameters (mu_log, sigma_log).
  static LognormalHedgeParams make(double log_m, double log_v, const BsParams& market);
  static LognormalHedgeParams make(const TargetDistribution& target,
                                   const BsParams& market);

  /// Risk-neutral growth of E[S_T^{sigma'}] from t to T, scaled so G(T) = 1.
  double g(double t) const;
  double payoff(double s_T) const;
  /// E_t at stock price s.
  double value(double t, double s) const;
};

/// F^{-1}(F_{S_T}(s_T)); the comonotone payoff with the target law. Throws
/// UnsupportedRegime when mu <= r.
double target_payoff(double s_T, const TargetDistribution& target,
                     const BsParams& market);

struct Positions {
  double delta = 0.0;  // stock units
  double psi = 0.0;    // bond units, B_t = e^{rt}
};

/// Requires 0 <= t < T.
Positions hedge_positions(double t, double s, const LognormalHedgeParams& hp);


struct HedgeState {
  double t = 0.0;
  double delta = 0.0;
  double psi = 0.0;
  double stock_price = 0.0;
  double bond_price = 1.0;
  double portfolio_value = 0.0;
};

struct HedgeRun {
  std::vector<HedgeState> states;  // one per rebalance, plus the terminal state
  double terminal_value = 0.0;
  double payoff = 0.0;
  double error = 0.0;  // terminal_value - payoff
};

/// Self-financing replication along `path` (stock prices on a uniform grid
/// over [0, T], path.size() - 1 steps), rebalancing every
/// (path.size() - 1) / rebalance_steps grid steps. Starts from E_0.
HedgeRun simulate_hedge(std::span<const double> path,
                        const LognormalHedgeParams& hp, std::size_t rebalance_steps);

/// Exact lognormal paths under the physical measure, n x (steps + 1), from
/// substreams (seed, hedge, i).
Matrix lognormal_paths(std::size_t n, std::size_t steps, const BsParams& market,
                       std::uint64_t seed);

struct HedgeExperiment {
  std::size_t rebalance_steps = 0;
  double rms_error = 0.0;
  double mean_error = 0.0;
};

/// RMS tracking error for each rebalance count over the same `n` paths of
/// `grid_steps` steps. Every rebalance count must divide grid_steps.
std::vector<HedgeExperiment> hedge_experiment(const TargetDistribution& target,
                                              const BsParams& market,
                                              std::span<const std::size_t> rebalances,
                                              std::size_t n, std::size_t grid_steps,
                                              std::uint64_t seed);

}  // namespace cec
