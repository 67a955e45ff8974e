#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "cec/matrix.hpp"
#include "cec/rng.hpp"

namespace cec {

/// Black-Scholes market. Rates are per year, volatility per sqrt(year).
struct BsParams {
  double mu = 0.03;
  double sigma = 0.3;
  double r = 0.02;
  double s0 = 1.0;
  double horizon = 10.0;

  /// Sharpe ratio (mu - r) / sigma.
  double theta() const noexcept { return (mu - r) / sigma; }
  void validate() const;

  friend bool operator==(const BsParams&, const BsParams&) = default;
};

/// CEV market dS = mu S dt + sigma S^{beta+1} dW, simulated through the
/// square-root diffusion r_t = S~^{2-beta*}, beta* = 2(beta+1).
struct CevParams {
  BsParams market;
  double beta = -0.25;
  int n_steps = 1000;

  double beta_star() const noexcept { return 2.0 * (beta + 1.0); }
  /// Requires 1 < beta* < 2, i.e. -1/2 < beta < 0.
  void validate() const;

  friend bool operator==(const CevParams&, const CevParams&) = default;
};

using ModelSpec = std::variant<BsParams, CevParams>;

enum class ModelTag { black_scholes, cev };

std::string_view to_string(ModelTag tag) noexcept;
const BsParams& market_of(const ModelSpec& model) noexcept;
void validate(const ModelSpec& model);

/// n draws of the discounted pricing kernel at the horizon.
struct StatePriceSample {
  std::vector<double> xi;
  std::vector<double> terminal_price;  // S_T (undiscounted)
  ModelTag model = ModelTag::black_scholes;
  std::uint64_t seed = 0;
  std::size_t absorbed = 0;  // CEV paths that hit zero

  friend bool operator==(const StatePriceSample&,
                         const StatePriceSample&) = default;
};

StatePriceSample bs_state_price(std::size_t n, const BsParams& p,
                                std::uint64_t seed);

/// dr = a(b - r) dt + sigma sqrt(r) dW, stored as (a, a*b, sigma) so that the
/// a -> 0 limit with finite a*b is representable.
struct SqrtDiffusion {
  double a = 0.0;
  double ab = 0.0;
  double sigma = 0.0;

  static SqrtDiffusion from_mean_reversion(double a, double b, double sigma);
  /// Coefficients of r_t = S~^{2-beta*} for a CEV market.
  static SqrtDiffusion for_cev(const CevParams& p);

  double b() const noexcept { return ab / a; }
  /// Degrees of freedom 4ab/sigma^2 of the transition law.
  double dimension() const noexcept { return 4.0 * ab / (sigma * sigma); }
  /// Closed-form conditional mean and variance of r_{t+dt} given r_t.
  double conditional_mean(double r, double dt) const;
  double conditional_variance(double r, double dt) const;
};

/// Exact-in-distribution transition over dt (noncentral chi-square, with the
/// Poisson-mixture branch when the dimension is <= 1). Zero is absorbing when
/// the dimension is non-positive.
double sqrt_diffusion_step(double r, double dt, const SqrtDiffusion& diffusion,
                           Rng& rng);
double sqrt_diffusion_step(double r, double dt, double a, double b,
                           double sigma, Rng& rng);

struct CevPaths {
  Matrix discounted_price;  // n x (n_steps + 1), column 0 is s0
  std::vector<double> times;
  std::size_t absorbed = 0;
};

/// Discounted price paths on the uniform grid. Stores every step; intended
/// for inspection and tests, cev_state_price streams instead.
CevPaths cev_paths(std::size_t n, const CevParams& p, std::uint64_t seed);

/// Pricing kernel along simulated CEV paths: Y_T from left-point sums with
/// Brownian increments recovered from the price increments, xi = e^{-rT} Y_T.
/// Absorbed paths freeze S~ at 1e-12 and are counted, not dropped.
StatePriceSample cev_state_price(std::size_t n, const CevParams& p,
                                 std::uint64_t seed);

StatePriceSample state_price(std::size_t n, const ModelSpec& model,
                             std::uint64_t seed);

/// Confluent hypergeometric M(a, c, z) by its power series (after Kummer's
/// transformation when z < 0). Stops when a term drops below 1e-14 of the
/// running sum; ConvergenceError after 1000 terms.
double kummer_m(double a, double c, double z);

/// Laplace transform E[exp(-s (<log S'>_T - <log S'>_t))] of the quadratic
/// variation of the driftless auxiliary CEV process with exponent -beta,
/// with the variance frozen at its initial value in h_t.
double laplace_qv(double s, const CevParams& p, double t = 0.0);

}  // namespace cec
