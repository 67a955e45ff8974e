#include "cec/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cec/copula.hpp"
#include "cec/hedge.hpp"
#include "cec/normal.hpp"
#include "cec/optimizer.hpp"
#include "cec/rng.hpp"
#include "cec/stats.hpp"

namespace cec {

std::pair<double, double> laplace_qv_monte_carlo(double s, const CevParams& p,
                                                 std::size_t n, std::size_t steps,
                                                 std::uint64_t seed) {
  const double beta_aux = -p.beta;
  const double sigma2 = p.market.sigma * p.market.sigma;
  const double dt = p.market.horizon / static_cast<double>(steps);
  const double sqdt = std::sqrt(dt);
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, Stream::validation, i);
    double log_s = std::log(p.market.s0);
    double qv = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      const double v = sigma2 * std::exp(2.0 * beta_aux * log_s);
      qv += v * dt;
      log_s += -0.5 * v * dt + std::sqrt(v) * sqdt * norm_quantile(rng.uniform());
    }
    samples[i] = std::exp(-s * qv);
  }
  return {mean(samples), std_error(samples)};
}

namespace {

CheckResult kernel_check(const std::string& name, const ModelSpec& model,
                         std::size_t n, std::uint64_t seed) {
  const auto k = state_price(n, model, seed);
  const auto& m = market_of(model);
  const double target = std::exp(-m.r * m.horizon);
  const double avg = mean(k.xi);
  const double se = std_error(k.xi);
  const double z = (avg - target) / se;
  return {name, std::abs(z) <= 4.0,
          fmt::format("E[xi_T] = {:.6f} +- {:.6f} (SE) vs e^(-rT) = {:.6f}, z = {:+.2f}, "
                      "absorbed = {}",
                      avg, se, target, z, k.absorbed)};
}

CheckResult brute_force_check(std::size_t instances, std::uint64_t seed) {
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    Rng rng(seed, Stream::validation, 1000000 + t);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 7.0);
    std::vector<double> z(n), xi(n);
    for (auto& v : z) v = std::floor(rng.uniform() * 5.0);  // ties on purpose
    for (auto& v : xi) v = rng.uniform();
    const double got = cost(z, xi).cost;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
      std::vector<double> zp(n);
      for (std::size_t i = 0; i < n; ++i) zp[i] = z[perm[i]];
      best = std::min(best, cost(zp, xi, false).cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    worst = std::max(worst, std::abs(got - best));
    if (got > best) ++mismatches;
  }
  return {"rearrangement vs brute force", mismatches == 0,
          fmt::format("{} instances (n <= 7), {} worse than exhaustive minimum, max |diff| = {:.3g}",
                      instances, mismatches, worst)};
}

CheckResult kendall_check(std::size_t n, std::uint64_t seed) {
  bool ok = true;
  std::string detail;
  for (double alpha : {1.0, 5.0, 20.0}) {
    const auto u = sample(n, 4, ClaytonParams(alpha), seed);
    const double tau = kendall_tau(u.values.column(0), u.values.column(3));
    const double expected = alpha / (alpha + 2.0);
    ok = ok && std::abs(tau - expected) <= 0.02;
    detail += fmt::format("{}alpha={}: tau={:.4f} (expect {:.4f})", detail.empty() ? "" : "; ",
                          alpha, tau, expected);
  }
  return {"Clayton Kendall tau within 0.02", ok, detail};
}

CheckResult cir_check(std::size_t n, std::uint64_t seed) {
  bool ok = true;
  std::string detail;
  const CevParams defaults;
  const SqrtDiffusion points[] = {
      SqrtDiffusion::for_cev(defaults),
      SqrtDiffusion::from_mean_reversion(0.5, 0.04, 0.2),
      SqrtDiffusion::from_mean_reversion(1.5, 0.02, 0.3),
  };
  const double r0s[] = {1.0, 0.04, 0.03};
  const double dts[] = {0.01, 0.5, 0.25};
  for (int c = 0; c < 3; ++c) {
    const auto& d = points[c];
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(seed, Stream::validation, 2000000 + static_cast<std::uint64_t>(c) * n + i);
      x[i] = sqrt_diffusion_step(r0s[c], dts[c], d, rng);
    }
    const double m = mean(x);
    const double v = sample_std(x) * sample_std(x);
    const double em = d.conditional_mean(r0s[c], dts[c]);
    const double ev = d.conditional_variance(r0s[c], dts[c]);
    const double zm = (m - em) / std_error(x);
    // SE of the sample variance from the fourth central moment.
    double m4 = 0.0;
    for (double xi : x) m4 += std::pow(xi - m, 4);
    m4 /= static_cast<double>(n);
    const double se_v = std::sqrt(std::max(m4 - v * v, 0.0) / static_cast<double>(n));
    const double zv = (v - ev) / se_v;
    ok = ok && std::abs(zm) <= 4.0 && std::abs(zv) <= 4.0;
    detail += fmt::format("{}(a={}, d={:.3g}): mean z={:+.2f}, var z={:+.2f}",
                          detail.empty() ? "" : "; ", d.a, d.dimension(), zm, zv);
  }
  return {"square-root diffusion moments within 4 SE", ok, detail};
}

CheckResult laplace_check(std::size_t n, std::size_t steps, std::uint64_t seed) {
  CevParams p;
  p.market.horizon = 1.0;
  const double s = 0.1;
  const double closed = laplace_qv(s, p);
  const auto [mc, se] = laplace_qv_monte_carlo(s, p, n, steps, seed);
  const double rel = std::abs(closed - mc) / mc;
  const double at_zero = laplace_qv(0.0, p);
  return {"Laplace transform vs Monte Carlo", rel <= 0.02 && std::abs(at_zero - 1.0) <= 1e-10,
          fmt::format("s={}: closed form {:.6f}, MC {:.6f} +- {:.6f}, rel diff {:.2e}; "
                      "L(0) = {:.12f}",
                      s, closed, mc, se, rel, at_zero)};
}

CheckResult hedge_check(std::size_t n, std::uint64_t seed) {
  const auto target = TargetDistribution::from_mean_std(100.0, 40.0);
  const std::size_t reb[] = {32, 512};
  const auto res = hedge_experiment(target, BsParams{}, reb, n, 512, seed);
  const double ratio = res[1].rms_error / res[0].rms_error;
  return {"hedge error shrinks with rebalancing", ratio < 0.5,
          fmt::format("RMS error {:.4f} at 32 rebalances, {:.4f} at 512, ratio {:.3f}",
                      res[0].rms_error, res[1].rms_error, ratio)};
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& o) {
  std::vector<CheckResult> out;
  out.push_back(kernel_check("BS kernel normalization", BsParams{}, o.bs_kernel_draws, o.seed));
  CevParams cev;
  cev.n_steps = o.cev_steps;
  out.push_back(kernel_check("CEV kernel normalization", cev, o.cev_kernel_draws, o.seed));
  out.push_back(brute_force_check(o.brute_force_instances, o.seed));
  out.push_back(kendall_check(o.copula_draws, o.seed));
  out.push_back(cir_check(o.cir_draws, o.seed));
  out.push_back(laplace_check(o.laplace_paths, o.laplace_steps, o.seed));
  out.push_back(hedge_check(o.hedge_paths, o.seed));
  return out;
}

}  // namespace cec
