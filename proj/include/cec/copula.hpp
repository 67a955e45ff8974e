#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "cec/matrix.hpp"

namespace cec {

/// Dependence parameter of the Clayton family. Admissible: alpha >= -1 and
/// alpha != 0 (the independence limit is not representable here; see
/// Dependence::independent()).
class ClaytonParams {
 public:
  explicit ClaytonParams(double alpha);

  double alpha() const noexcept { return alpha_; }

  /// Throws DomainError if the family is not an N-dimensional copula for
  /// this alpha, i.e. alpha < -1/(N-1) with N > 2.
  void check_dimension(std::size_t periods) const;

  /// Kendall's tau of any bivariate margin, alpha / (alpha + 2).
  double kendall_tau() const noexcept { return alpha_ / (alpha_ + 2.0); }

  friend bool operator==(const ClaytonParams&, const ClaytonParams&) = default;

 private:
  double alpha_;
};

/// Either a Clayton copula or plain i.i.d. uniforms.
struct Dependence {
  std::optional<ClaytonParams> clayton;

  static Dependence clayton_alpha(double alpha) {
    return Dependence{ClaytonParams(alpha)};
  }
  static Dependence independent() { return Dependence{}; }
  bool is_independent() const noexcept { return !clayton.has_value(); }

  friend bool operator==(const Dependence&, const Dependence&) = default;
};

/// n x N matrix of copula uniforms, every entry in (0, 1).
struct CopulaSample {
  Matrix values;
  Dependence dependence;
  std::uint64_t seed = 0;
};

// Archimedean pieces of the Clayton family.
double generator(double u, const ClaytonParams& p);
double inverse_generator(double t, const ClaytonParams& p);
double inverse_generator_derivative(double t, const ClaytonParams& p, int k);

/// Clayton copula C(u_1..u_N); a non-positive inner sum yields 0.
double copula_cdf(std::span<const double> point, const ClaytonParams& p);

/// Distribution function of the radial variable C(U_1..U_N) on (0, 1].
double radial_cdf(double v, const ClaytonParams& p, std::size_t periods);

/// Bisection inverse of radial_cdf on [1e-12, 1 - 1e-12], |F(v) - w| <= 1e-10.
double radial_quantile(double w, const ClaytonParams& p, std::size_t periods);

/// Draws n scenarios of an N-dimensional Clayton vector by the conditional
/// (radial/simplex) method. Scenario i uses substream (seed, copula, i).
CopulaSample sample(std::size_t n, std::size_t periods, const ClaytonParams& p,
                    std::uint64_t seed);

/// Same shape, independent uniforms, for any N >= 1. Uses the same substreams
/// as the Clayton sampler, so column draws are common across dependence
/// settings.
CopulaSample sample_independent(std::size_t n, std::size_t periods,
                                std::uint64_t seed);

CopulaSample sample(std::size_t n, std::size_t periods, const Dependence& dep,
                    std::uint64_t seed);

}  // namespace cec
