#include "cec/market.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "cec/errors.hpp"
#include "cec/normal.hpp"

namespace cec {

namespace {

constexpr double kAbsorptionFloor = 1e-12;
constexpr double kSeriesTol = 1e-14;
constexpr int kSeriesCap = 1000;

// (1 - e^{-a dt}) / a, equal to dt at a = 0.
double decay_integral(double a, double dt) {
  return a == 0.0 ? dt : -std::expm1(-a * dt) / a;
}

double chi_square(double dof, Rng& rng) {
  if (!(dof > 0.0)) return 0.0;  // chi^2 with no positive dof: point mass at 0
  std::gamma_distribution<double> gamma(0.5 * dof, 2.0);
  return gamma(rng);
}

bool is_non_positive_integer(double x) {
  return x <= 0.0 && std::floor(x) == x;
}

// Propagates one CEV path on the uniform grid and accumulates log Y_T.
class CevStepper {
 public:
  explicit CevStepper(const CevParams& p)
      : p_(p),
        diffusion_(SqrtDiffusion::for_cev(p)),
        power_(2.0 - p.beta_star()),
        dt_(p.market.horizon / p.n_steps),
        excess_(p.market.mu - p.market.r),
        theta_(p.market.theta()) {}

  void reset(double s0) {
    s_ = s0;
    state_ = std::pow(s0, power_);
    log_y_ = 0.0;
    absorbed_ = false;
  }

  void step(Rng& rng) {
    const double next_state =
        absorbed_ ? 0.0 : sqrt_diffusion_step(state_, dt_, diffusion_, rng);
    double next_s = kAbsorptionFloor;
    if (next_state > 0.0) {
      next_s = std::max(std::pow(next_state, 1.0 / power_), kAbsorptionFloor);
    } else {
      absorbed_ = true;
    }
    const double sigma = p_.market.sigma;
    const double beta = p_.beta;
    const double dw = (next_s - s_ - excess_ * s_ * dt_) /
                      (sigma * std::pow(s_, beta + 1.0));
    const double risk_price = theta_ * std::pow(s_, -beta);
    log_y_ += -risk_price * dw - 0.5 * risk_price * risk_price * dt_;
    state_ = next_state;
    s_ = next_s;
  }

  double price() const noexcept { return s_; }
  double log_density() const noexcept { return log_y_; }
  bool absorbed() const noexcept { return absorbed_; }

 private:
  const CevParams& p_;
  SqrtDiffusion diffusion_;
  double power_;
  double dt_;
  double excess_;
  double theta_;
  double s_ = 0.0;
  double state_ = 0.0;
  double log_y_ = 0.0;
  bool absorbed_ = false;
};

}  // namespace

void BsParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError(fmt::format("sigma must be > 0, got {}", sigma));
  }
  if (!(s0 > 0.0) || !std::isfinite(s0)) {
    throw DomainError(fmt::format("s0 must be > 0, got {}", s0));
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError(fmt::format("horizon must be > 0, got {}", horizon));
  }
  if (!std::isfinite(mu) || !std::isfinite(r)) {
    throw DomainError("mu and r must be finite");
  }
}

void CevParams::validate() const {
  market.validate();
  if (!(beta > -0.5 && beta < 0.0)) {
    throw DomainError(fmt::format(
        "CEV beta must lie in (-1/2, 0) so that 1 < beta* < 2, got {}", beta));
  }
  if (n_steps < 1) {
    throw DomainError(fmt::format("n_steps must be >= 1, got {}", n_steps));
  }
}

std::string_view to_string(ModelTag tag) noexcept {
  return tag == ModelTag::cev ? "cev" : "black-scholes";
}

const BsParams& market_of(const ModelSpec& model) noexcept {
  if (const auto* cev = std::get_if<CevParams>(&model)) return cev->market;
  return std::get<BsParams>(model);
}

void validate(const ModelSpec& model) {
  std::visit([](const auto& p) { p.validate(); }, model);
}

StatePriceSample bs_state_price(std::size_t n, const BsParams& p,
                                std::uint64_t seed) {
  if (n < 1) throw DomainError("bs_state_price: need at least one scenario");
  p.validate();
  const double t = p.horizon;
  const double drift = p.mu - 0.5 * p.sigma * p.sigma;
  const double theta = p.theta();
  const double elasticity = theta / p.sigma;
  const double scale = std::exp(elasticity * drift * t -
                                (p.r + 0.5 * theta * theta) * t);
  const double vol = p.sigma * std::sqrt(t);

  StatePriceSample out;
  out.model = ModelTag::black_scholes;
  out.seed = seed;
  out.xi.resize(n);
  out.terminal_price.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, Stream::kernel, i);
    const double z = norm_quantile(rng.uniform());
    const double growth = std::exp(drift * t + vol * z);
    out.terminal_price[i] = p.s0 * growth;
    out.xi[i] = scale * std::pow(growth, -elasticity);
  }
  return out;
}

SqrtDiffusion SqrtDiffusion::from_mean_reversion(double a, double b,
                                                 double sigma) {
  return SqrtDiffusion{a, a * b, sigma};
}

SqrtDiffusion SqrtDiffusion::for_cev(const CevParams& p) {
  const double bs = p.beta_star();
  const double power = 2.0 - bs;
  const double sigma = p.market.sigma;
  return SqrtDiffusion{-(p.market.mu - p.market.r) * power,
                       0.5 * sigma * sigma * power * (1.0 - bs),
                       sigma * power};
}

double SqrtDiffusion::conditional_mean(double r, double dt) const {
  return r * std::exp(-a * dt) + ab * decay_integral(a, dt);
}

double SqrtDiffusion::conditional_variance(double r, double dt) const {
  const double s2 = sigma * sigma;
  const double phi = decay_integral(a, dt);
  return r * s2 * std::exp(-a * dt) * phi + 0.5 * ab * s2 * phi * phi;
}

double sqrt_diffusion_step(double r, double dt, const SqrtDiffusion& diffusion,
                           Rng& rng) {
  if (!(dt > 0.0)) {
    throw DomainError(fmt::format("sqrt_diffusion_step: dt must be > 0, got {}", dt));
  }
  if (!(r >= 0.0)) {
    throw DomainError(fmt::format("sqrt_diffusion_step: r must be >= 0, got {}", r));
  }
  const double s2 = diffusion.sigma * diffusion.sigma;
  const double c = 0.25 * s2 * decay_integral(diffusion.a, dt);
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError(fmt::format(
        "sqrt_diffusion_step: invalid parameters, c = {} must be > 0", c));
  }
  const double lambda = r * std::exp(-diffusion.a * dt) / c;
  const double d = diffusion.dimension();

  if (d > 1.0) {
    const double z = norm_quantile(rng.uniform());
    const double x = chi_square(d - 1.0, rng);
    const double shifted = z + std::sqrt(lambda);
    return c * (shifted * shifted + x);
  }
  long long count = 0;
  if (lambda > 0.0) {
    std::poisson_distribution<long long> poisson(0.5 * lambda);
    count = poisson(rng);
  }
  return c * chi_square(d + 2.0 * static_cast<double>(count), rng);
}

double sqrt_diffusion_step(double r, double dt, double a, double b,
                           double sigma, Rng& rng) {
  return sqrt_diffusion_step(r, dt, SqrtDiffusion::from_mean_reversion(a, b, sigma),
                             rng);
}

CevPaths cev_paths(std::size_t n, const CevParams& p, std::uint64_t seed) {
  if (n < 1) throw DomainError("cev_paths: need at least one path");
  p.validate();
  const auto steps = static_cast<std::size_t>(p.n_steps);
  CevPaths out{Matrix(n, steps + 1), std::vector<double>(steps + 1), 0};
  const double dt = p.market.horizon / p.n_steps;
  for (std::size_t k = 0; k <= steps; ++k) out.times[k] = dt * static_cast<double>(k);

  CevStepper stepper(p);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, Stream::kernel, i);
    stepper.reset(p.market.s0);
    auto row = out.discounted_price.row(i);
    row[0] = p.market.s0;
    for (std::size_t k = 1; k <= steps; ++k) {
      stepper.step(rng);
      row[k] = stepper.price();
    }
    if (stepper.absorbed()) ++out.absorbed;
  }
  return out;
}

StatePriceSample cev_state_price(std::size_t n, const CevParams& p,
                                 std::uint64_t seed) {
  if (n < 1) throw DomainError("cev_state_price: need at least one path");
  p.validate();
  const double discount = std::exp(-p.market.r * p.market.horizon);
  const double growth = std::exp(p.market.r * p.market.horizon);

  StatePriceSample out;
  out.model = ModelTag::cev;
  out.seed = seed;
  out.xi.resize(n);
  out.terminal_price.resize(n);
  CevStepper stepper(p);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, Stream::kernel, i);
    stepper.reset(p.market.s0);
    for (int k = 0; k < p.n_steps; ++k) stepper.step(rng);
    out.xi[i] = discount * std::exp(stepper.log_density());
    out.terminal_price[i] = stepper.price() * growth;
    if (stepper.absorbed()) ++out.absorbed;
  }
  return out;
}

StatePriceSample state_price(std::size_t n, const ModelSpec& model,
                             std::uint64_t seed) {
  if (const auto* cev = std::get_if<CevParams>(&model)) {
    return cev_state_price(n, *cev, seed);
  }
  return bs_state_price(n, std::get<BsParams>(model), seed);
}

namespace {

double kummer_series(double a, double c, double z) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 0; k < kSeriesCap; ++k) {
    term *= (a + k) / (c + k) * z / (k + 1);
    sum += term;
    if (term == 0.0 || std::abs(term) < kSeriesTol * std::abs(sum)) return sum;
  }
  throw ConvergenceError(fmt::format(
      "kummer_m: series for M({}, {}, {}) not converged after {} terms", a, c,
      z, kSeriesCap));
}

}  // namespace

double kummer_m(double a, double c, double z) {
  if (is_non_positive_integer(c)) {
    throw DomainError(fmt::format("kummer_m: c = {} is a non-positive integer", c));
  }
  if (a == 0.0 || z == 0.0) return 1.0;
  // Kummer's transformation keeps every term positive for z < 0, c > a > 0.
  if (z < 0.0) return std::exp(z) * kummer_series(c - a, c, -z);
  return kummer_series(a, c, z);
}

double laplace_qv(double s, const CevParams& p, double t) {
  p.validate();
  if (!(s >= 0.0)) throw DomainError(fmt::format("laplace_qv: s must be >= 0, got {}", s));
  const double horizon = p.market.horizon;
  if (!(t >= 0.0 && t < horizon)) {
    throw DomainError(fmt::format("laplace_qv: t must lie in [0, T), got {}", t));
  }
  // Auxiliary process: driftless CEV with exponent beta' = -beta, whose
  // variance rate V = sigma^2 S'^{2 beta'} is a 3/2 process with p = 0,
  // q = beta'(2 beta' - 1), epsilon = 2 beta'.
  const double beta_aux = -p.beta;
  const double eps2 = 4.0 * beta_aux * beta_aux;
  const double sigma = p.market.sigma;
  const double h = (horizon - t) * sigma * sigma * std::pow(p.market.s0, 2.0 * beta_aux);
  const double x = 2.0 / (eps2 * h);
  const double root = std::sqrt(1.0 + 8.0 * s);
  const double alpha_s = (root - 1.0) / (4.0 * beta_aux);
  const double gamma_s = root / (2.0 * beta_aux) + 1.0;
  if (is_non_positive_integer(gamma_s - alpha_s)) {
    throw DomainError(fmt::format(
        "laplace_qv: Gamma pole, gamma_s - alpha_s = {}", gamma_s - alpha_s));
  }
  if (alpha_s == 0.0) return 1.0;
  const double log_prefactor = std::lgamma(gamma_s - alpha_s) -
                               std::lgamma(gamma_s) + alpha_s * std::log(x);
  return std::exp(log_prefactor) * kummer_m(alpha_s, gamma_s, -x);
}

}  // namespace cec
