#include "cec/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cec/errors.hpp"
#include "cec/rng.hpp"

namespace cec {

namespace {

constexpr double kBracketLow = 1e-12;
constexpr double kBracketHigh = 1.0 - 1e-12;
constexpr double kQuantileTol = 1e-10;
constexpr int kMaxBisection = 200;
// Largest double below 1. Rounding in phi^{-1} can otherwise land on 1.0.
constexpr double kBelowOne = 1.0 - 0x1.0p-53;

void check_periods(std::size_t periods) {
  if (periods < 2) throw DomainError("copula: need at least 2 periods");
}

}  // namespace

ClaytonParams::ClaytonParams(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || alpha < -1.0) {
    throw DomainError(fmt::format(
        "alpha must lie in [-1, inf) excluding 0, got {}", alpha));
  }
  if (alpha == 0.0) {
    throw DomainError(
        "alpha must be non-zero (alpha in [-1, inf) \\ {0}); use the "
        "independent dependence mode instead");
  }
}

void ClaytonParams::check_dimension(std::size_t periods) const {
  check_periods(periods);
  if (periods > 2 && alpha_ < 0.0) {
    const double floor = -1.0 / static_cast<double>(periods - 1);
    if (alpha_ < floor) {
      throw DomainError(fmt::format(
          "alpha = {} is not a valid {}-dimensional Clayton copula; negative "
          "alpha requires alpha >= -1/(N-1) = {:.6g}",
          alpha_, periods, floor));
    }
  }
}

double generator(double u, const ClaytonParams& p) {
  if (!(u > 0.0 && u <= 1.0)) {
    throw DomainError(fmt::format("generator: u must lie in (0, 1], got {}", u));
  }
  const double a = p.alpha();
  return std::expm1(-a * std::log(u)) / a;
}

double inverse_generator(double t, const ClaytonParams& p) {
  const double a = p.alpha();
  const double base = 1.0 + a * t;
  if (!(base > 0.0)) {
    throw DomainError(fmt::format(
        "inverse_generator: need 1 + alpha*t > 0 (alpha={}, t={})", a, t));
  }
  return std::exp(-std::log1p(a * t) / a);
}

double inverse_generator_derivative(double t, const ClaytonParams& p, int k) {
  if (k < 1) throw DomainError("inverse_generator_derivative: k must be >= 1");
  const double a = p.alpha();
  const double base = 1.0 + a * t;
  if (!(base > 0.0)) {
    throw DomainError(fmt::format(
        "inverse_generator_derivative: need 1 + alpha*t > 0 (alpha={}, t={})",
        a, t));
  }
  double prod = 1.0;
  for (int j = 0; j < k; ++j) prod *= 1.0 + j * a;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(base, -(1.0 + k * a) / a) * prod;
}

double copula_cdf(std::span<const double> point, const ClaytonParams& p) {
  const double a = p.alpha();
  double inner = 1.0 - static_cast<double>(point.size());
  for (double u : point) {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw DomainError(
          fmt::format("copula_cdf: coordinates must lie in [0, 1], got {}", u));
    }
    if (u == 0.0) return 0.0;
    inner += std::pow(u, -a);
  }
  if (!(inner > 0.0)) return 0.0;
  return std::pow(inner, -1.0 / a);
}

// The k-th series term (1/k!) (-1)^k phi^{-1(k)}(phi(v)) phi(v)^k collapses to
// v * c_k * x^k with x = (1 - v^alpha)/alpha and c_k = prod_{j<k}(1+j alpha)/k!,
// because 1 + alpha*phi(v) = v^{-alpha}. This form stays finite for tiny v.
double radial_cdf(double v, const ClaytonParams& p, std::size_t periods) {
  check_periods(periods);
  if (!(v > 0.0 && v <= 1.0)) {
    throw DomainError(fmt::format("radial_cdf: v must lie in (0, 1], got {}", v));
  }
  if (v == 1.0) return 1.0;
  const double a = p.alpha();
  const double x = -std::expm1(a * std::log(v)) / a;
  double sum = 0.0;
  double power = 1.0;
  double coeff = 1.0;
  for (std::size_t k = 0; k < periods; ++k) {
    sum += coeff * power;
    coeff *= (1.0 + static_cast<double>(k) * a) / static_cast<double>(k + 1);
    power *= x;
  }
  return v * sum;
}

double radial_quantile(double w, const ClaytonParams& p, std::size_t periods) {
  if (!(w > 0.0 && w < 1.0)) {
    throw DomainError(
        fmt::format("radial_quantile: w must lie in (0, 1), got {}", w));
  }
  double lo = kBracketLow;
  double hi = kBracketHigh;
  double mid = lo;
  double f = 0.0;
  for (int iter = 0; iter < kMaxBisection; ++iter) {
    mid = lo + 0.5 * (hi - lo);
    f = radial_cdf(mid, p, periods);
    if (std::abs(f - w) <= kQuantileTol) return mid;
    if (mid <= lo || mid >= hi) break;  // bracket exhausted at double precision
    (f < w ? lo : hi) = mid;
  }
  throw ConvergenceError(fmt::format(
      "radial_quantile: no v in [1e-12, 1-1e-12] with |F(v) - {}| <= 1e-10 "
      "(alpha={}, N={}, last v={}, F={})",
      w, p.alpha(), periods, mid, f));
}

CopulaSample sample(std::size_t n, std::size_t periods, const ClaytonParams& p,
                    std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: need at least one scenario");
  p.check_dimension(periods);

  CopulaSample out{Matrix(n, periods), Dependence{p}, seed};
  std::vector<double> w(periods);
  std::vector<double> s(periods - 1);
  std::vector<double> tail(periods);  // tail[k] = s_k * ... * s_{N-2}

  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, Stream::copula, i);
    for (auto& wk : w) wk = rng.uniform();
    for (std::size_t k = 0; k + 1 < periods; ++k) {
      s[k] = std::pow(w[k], 1.0 / static_cast<double>(k + 1));
    }
    tail[periods - 1] = 1.0;
    for (std::size_t k = periods - 1; k-- > 0;) tail[k] = s[k] * tail[k + 1];

    const double v = radial_quantile(w[periods - 1], p, periods);
    const double phi_v = generator(v, p);

    auto row = out.values.row(i);
    row[0] = inverse_generator(tail[0] * phi_v, p);
    for (std::size_t k = 1; k + 1 < periods; ++k) {
      row[k] = inverse_generator((1.0 - s[k - 1]) * tail[k] * phi_v, p);
    }
    row[periods - 1] = inverse_generator((1.0 - s[periods - 2]) * phi_v, p);
    for (auto& u : row) u = std::min(u, kBelowOne);
  }
  return out;
}

CopulaSample sample_independent(std::size_t n, std::size_t periods,
                                std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: need at least one scenario");
  if (periods < 1) throw DomainError("sample: need at least one period");
  CopulaSample out{Matrix(n, periods), Dependence::independent(), seed};
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, Stream::copula, i);
    for (auto& u : out.values.row(i)) u = rng.uniform();
  }
  return out;
}

CopulaSample sample(std::size_t n, std::size_t periods, const Dependence& dep,
                    std::uint64_t seed) {
  if (dep.clayton) return sample(n, periods, *dep.clayton, seed);
  return sample_independent(n, periods, seed);
}

}  // namespace cec
