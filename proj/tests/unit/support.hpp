#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cec/matrix.hpp"

namespace testing {

// Marshall-Olkin frailty sampler for Clayton with alpha > 0; shares no code
// with the library's conditional sampler.
inline cec::Matrix marshall_olkin(std::size_t n, std::size_t periods, double alpha,
                                  std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> frailty(1.0 / alpha, 1.0);
  std::exponential_distribution<double> expo(1.0);
  cec::Matrix u(n, periods);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = frailty(gen);
    for (std::size_t k = 0; k < periods; ++k) {
      u(i, k) = std::pow(1.0 + expo(gen) / v, -1.0 / alpha);
    }
  }
  return u;
}

// O(n^2) pair counting.
inline double kendall_brute(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double a = (x[i] - x[j]) * (y[i] - y[j]);
      if (x[i] == x[j] && y[i] == y[j]) continue;
      if (x[i] == x[j]) {
        ++tx;
      } else if (y[i] == y[j]) {
        ++ty;
      } else if (a > 0) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  return (concordant - discordant) /
         std::sqrt((concordant + discordant + tx) * (concordant + discordant + ty));
}

// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
double simpson(F f, double a, double b, int panels = 2000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace testing
