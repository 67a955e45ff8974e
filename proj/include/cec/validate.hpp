#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cec/market.hpp"

namespace cec {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured values and the bound they were held to
};

/// Monte Carlo estimate of E[exp(-s <log S'>_T)] for the auxiliary driftless
/// CEV process of laplace_qv (log-Euler, `steps` steps, n paths from
/// substreams (seed, validation, i)). Returns {mean, standard error}.
std::pair<double, double> laplace_qv_monte_carlo(double s, const CevParams& p,
                                                 std::size_t n, std::size_t steps,
                                                 std::uint64_t seed);

struct ValidationOptions {
  std::uint64_t seed = 7;
  std::size_t bs_kernel_draws = 1000000;
  std::size_t cev_kernel_draws = 20000;
  int cev_steps = 250;
  std::size_t brute_force_instances = 200;
  std::size_t copula_draws = 20000;
  std::size_t cir_draws = 200000;
  std::size_t laplace_paths = 20000;
  std::size_t laplace_steps = 500;
  std::size_t hedge_paths = 2000;
};

/// Kernel normalization (both models), rearrangement against brute force,
/// Clayton Kendall tau, square-root diffusion moments, Laplace transform vs
/// Monte Carlo, and hedge convergence.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

}  // namespace cec
