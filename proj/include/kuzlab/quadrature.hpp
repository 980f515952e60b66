#ifndef KUZLAB_QUADRATURE_HPP_
#define KUZLAB_QUADRATURE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "kuzlab/error.hpp"

namespace kuzlab {

// Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_n.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule make_gauss_legendre(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

inline const GaussRule &gauss_legendre_10() {
  static const GaussRule rule = make_gauss_legendre(10);
  return rule;
}

// Composite 10-point Gauss-Legendre over `panels` equal panels of [a, b].
template <typename F>
double integrate_composite(F &&f, double a, double b, std::size_t panels) {
  if (b <= a || panels == 0) return 0.0;
  const GaussRule &rule = gauss_legendre_10();
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      panel += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * panel;
  }
  return total;
}

// Composite rule over [breaks.front(), breaks.back()] that never straddles a
// breakpoint; panels are shared out in proportion to segment length.
template <typename F>
double integrate_with_breaks(F &&f, std::vector<double> breaks,
                             std::size_t total_panels) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.size() < 2) return 0.0;
  const double span = breaks.back() - breaks.front();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double len = breaks[i + 1] - breaks[i];
    const auto panels = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::ceil(total_panels * len / span)));
    total += integrate_composite(f, breaks[i], breaks[i + 1], panels);
  }
  return total;
}

namespace detail {
template <typename F>
double simpson_step(F &f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, int &budget) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  budget -= 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || budget <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget);
}
}  // namespace detail

// Adaptive Simpson seeded with `initial_panels` equal panels. `budget` caps
// the total number of function evaluations.
template <typename F>
double adaptive_simpson(F &&f, double a, double b, double tol,
                        std::size_t initial_panels = 64, int max_depth = 40,
                        int budget = 4'000'000) {
  if (b <= a) return 0.0;
  const double h = (b - a) / static_cast<double>(initial_panels);
  double total = 0.0;
  double fa = f(a);
  for (std::size_t p = 0; p < initial_panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double hi = (p + 1 == initial_panels) ? b : lo + h;
    const double fm = f(0.5 * (lo + hi));
    const double fb = f(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::simpson_step(f, lo, hi, fa, fm, fb, whole,
                                  tol / static_cast<double>(initial_panels),
                                  max_depth, budget);
    fa = fb;
  }
  return total;
}

// Bisection for a sign change of f on [lo, hi].
template <typename F>
double bisect_root(F &&f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  detail::require((flo < 0) != (fhi < 0), "bisect_root: no sign change on bracket");
  for (int iter = 0; iter < 400 && hi - lo > tol * std::max(1.0, std::abs(lo));
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// n points log-uniformly spaced on [lo, hi], endpoints included.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  detail::require(lo > 0 && hi >= lo && n >= 1, "log_grid: need 0 < lo <= hi, n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

// Geometric grid lo * ratio^j for j >= 0 while <= hi (hi appended if missed).
inline std::vector<double> geometric_grid(double lo, double hi,
                                          double points_per_factor,
                                          double factor = 10.0) {
  detail::require(lo > 0 && hi >= lo && points_per_factor > 0 && factor > 1,
                  "geometric_grid: invalid bounds");
  const double ratio = std::pow(factor, 1.0 / points_per_factor);
  std::vector<double> g;
  for (int i = 0;; ++i) {
    const double x = lo * std::pow(ratio, i);
    if (x > hi * (1 + 1e-12)) break;
    g.push_back(x);
  }
  if (g.back() < hi * (1 - 1e-12)) g.push_back(hi);
  return g;
}

}  // namespace kuzlab

#endif  // KUZLAB_QUADRATURE_HPP_
