#ifndef KUZLAB_SPECFUN_HPP_
#define KUZLAB_SPECFUN_HPP_

#include <cmath>
#include <numbers>

#include "kuzlab/error.hpp"

namespace kuzlab {

// Euler gamma on x > 0.
inline double gamma_fn(double x) {
  detail::require(x > 0 && std::isfinite(x), "gamma_fn: requires x > 0");
  return std::tgamma(x);
}

// Volume of the unit ball in formal dimension m > 0: pi^{m/2} / Gamma(m/2+1).
inline double ball_volume(double m) {
  detail::require(m > 0 && std::isfinite(m), "ball_volume: requires m > 0");
  return std::pow(std::numbers::pi, 0.5 * m) / gamma_fn(0.5 * m + 1.0);
}

// Integral of the scale weight over (0, inf): s 2^{s-1} Gamma(s/2).
inline double scale_weight_mass(double s) {
  detail::require(s > 0, "scale_weight_mass: requires s > 0");
  return s * std::pow(2.0, s - 1.0) * gamma_fn(0.5 * s);
}

// Every dimension-dependent constant of the leading-order law.
struct ConstantBundle {
  int n = 0;
  double s = 0.0;
  double volBs = 0.0;    // vol(B^s)
  double volBns = 0.0;   // vol(B^{n-s})
  double Cns = 0.0;      // (2 pi)^{-(n-s)} vol(B^{n-s})
  double gammaS = 0.0;   // s 2^{s-1} Gamma(s/2) vol(B^s)
  double gammaNS = 0.0;  // (4 pi)^{-n/2} gammaS
  double kappaS = 0.0;   // gammaS / vol(B^s)
};

inline ConstantBundle constant_bundle(int n, double s) {
  detail::require(n >= 1, "constant_bundle: requires n >= 1");
  detail::require(s > 0 && s < n, "constant_bundle: requires 0 < s < n");
  ConstantBundle c;
  c.n = n;
  c.s = s;
  c.volBs = ball_volume(s);
  c.volBns = ball_volume(n - s);
  c.Cns = std::pow(2.0 * std::numbers::pi, -(n - s)) * c.volBns;
  c.kappaS = scale_weight_mass(s);
  c.gammaS = c.volBs * c.kappaS;
  c.gammaNS = std::pow(4.0 * std::numbers::pi, -0.5 * n) * c.gammaS;
  return c;
}

// w_s(u) = u^{s+1} e^{-u^2/4} / 2.
inline double scale_weight(double s, double u) {
  if (u <= 0) return 0.0;
  return 0.5 * std::pow(u, s + 1.0) * std::exp(-0.25 * u * u);
}

namespace detail {
constexpr double kMultiplierSeriesCutoff = 1e-3;
}

// Fourier multiplier of normalized ball averaging on T^s:
// m_s(tau) = 2^{s/2} Gamma(s/2+1) J_{s/2}(tau) / tau^{s/2}, m_s(0) = 1.
inline double ball_multiplier(int s, double tau) {
  detail::require(s >= 1, "ball_multiplier: requires integer s >= 1");
  detail::require(tau >= 0 && std::isfinite(tau), "ball_multiplier: requires tau >= 0");
  const double nu = 0.5 * s;
  if (tau < detail::kMultiplierSeriesCutoff) {
    // Gamma(nu+1) sum_k (-tau^2/4)^k / (k! Gamma(k+nu+1)); terms shrink by
    // ~1e-7 each, four of them are plenty.
    const double q = -0.25 * tau * tau;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 5; ++k) {
      term *= q / (k * (k + nu));
      sum += term;
    }
    return sum;
  }
  return std::pow(2.0, nu) * gamma_fn(nu + 1.0) * std::cyl_bessel_j(nu, tau) /
         std::pow(tau, nu);
}

// Decreasing majorant of |m_s| built from the Bessel modulus
// M_nu = sqrt(J_nu^2 + Y_nu^2) >= |J_nu|. For s = 1 it is exactly 1/tau.
inline double ball_multiplier_envelope(int s, double tau) {
  detail::require(s >= 1 && tau > 0, "ball_multiplier_envelope: requires s >= 1, tau > 0");
  const double nu = 0.5 * s;
  const double j = std::cyl_bessel_j(nu, tau);
  const double y = std::cyl_neumann(nu, tau);
  return std::pow(2.0, nu) * gamma_fn(nu + 1.0) * std::sqrt(j * j + y * y) /
         std::pow(tau, nu);
}

}  // namespace kuzlab

#endif  // KUZLAB_SPECFUN_HPP_
