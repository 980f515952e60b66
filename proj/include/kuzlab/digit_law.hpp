#ifndef KUZLAB_DIGIT_LAW_HPP_
#define KUZLAB_DIGIT_LAW_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "kuzlab/error.hpp"
#include "kuzlab/measures.hpp"

namespace kuzlab {

// Law of the difference Z = X - Y of two independent draws on one digit axis,
// Z = scale * sum_j e_j b^{-j} with e_j distributed as d - d'. The circle
// distance between the draws is rho = min(|Z|, 1 - |Z|).
class DigitDifferenceLaw {
 public:
  explicit DigitDifferenceLaw(const DigitAxis &axis) : axis_(axis) {
    const double inv = 1.0 / static_cast<double>(axis.digits.size() * axis.digits.size());
    std::map<int, double> p;
    for (int d : axis.digits)
      for (int e : axis.digits) p[d - e] += inv;
    for (const auto &[e, w] : p) {
      steps_.push_back(axis.scale * static_cast<double>(e));
      probs_.push_back(w);
    }
    half_span_ = axis.scale * digit_axis_span(axis);
    moments_ = compute_moments(kMaxOrder);
  }

  const DigitAxis &axis() const { return axis_; }

  // E[Z^m], m = 0..kMaxOrder.
  const std::vector<double> &moments() const { return moments_; }

  // P(rho <= r).
  double cdf(double r) const {
    if (r <= 0.0) return 0.0;
    if (r >= 0.5) return 1.0;
    double total = 0.0;
    cdf_node(0.0, 1.0, 1.0, r, total);
    return total;
  }

  // E[exp(-rho^2 / 4t)].
  double gaussian_expectation(double t) const {
    detail::require(t > 0, "gaussian_expectation: t must be positive");
    double total = 0.0;
    gauss_node(0.0, 1.0, 1.0, t, std::sqrt(4.0 * t), total);
    return total;
  }

  static constexpr int kMaxOrder = 10;

 private:
  static constexpr double kPrune = 1e-18;

  std::vector<double> compute_moments(int order) const {
    const double b = axis_.base;
    std::vector<double> M(order + 1, 0.0);
    M[0] = 1.0;
    // E[(scale e)^j]
    std::vector<double> ej(order + 1, 0.0);
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      double pw = 1.0;
      for (int j = 0; j <= order; ++j, pw *= steps_[i]) ej[j] += probs_[i] * pw;
    }
    for (int m = 1; m <= order; ++m) {
      double acc = 0.0;
      double binom = 1.0;  // C(m, i)
      for (int i = 0; i < m; ++i) {
        acc += binom * ej[m - i] * M[i];
        binom = binom * (m - i) / (i + 1);
      }
      const double bm = std::pow(b, -m);
      M[m] = bm * acc / (1.0 - bm);
    }
    return M;
  }

  // Node: Z = z + w * Z' with Z' ~ Z, carrying probability p.
  void cdf_node(double z, double w, double p, double r, double &total) const {
    const double R = w * half_span_;
    const DistanceRange rg = abs_distance_range(z - R, z + R);
    if (rg.lo > r) return;
    if (rg.hi <= r) {
      total += p;
      return;
    }
    if (p < kPrune || R < 1e-17) {
      total += 0.5 * p;
      return;
    }
    const double wc = w / axis_.base;
    for (std::size_t i = 0; i < steps_.size(); ++i)
      cdf_node(z + wc * steps_[i], wc, p * probs_[i], r, total);
  }

  // Range of min(|z|, 1 - |z|) over z in [lo, hi] within [-1, 1].
  static DistanceRange abs_distance_range(double lo, double hi) {
    return circle_distance_range(0.0, lo, hi);
  }

  void gauss_node(double z, double w, double p, double t, double sigma, double &total) const {
    const double R = w * half_span_;
    const double lo = z - R, hi = z + R;
    const DistanceRange rg = abs_distance_range(lo, hi);
    if (p * std::exp(-rg.lo * rg.lo / (4.0 * t)) < 1e-22) return;
    const bool crosses = (lo < 0.5 && hi > 0.5) || (lo < -0.5 && hi > -0.5);
    if (!crosses && R <= 0.02 * sigma) {
      const double centre = z > 0.5 ? 1.0 : (z < -0.5 ? -1.0 : 0.0);
      total += p * taylor_gauss(z - centre, w, sigma);
      return;
    }
    if (R < 1e-17) {
      total += p * std::exp(-rg.lo * rg.lo / (4.0 * t));
      return;
    }
    const double wc = w / axis_.base;
    for (std::size_t i = 0; i < steps_.size(); ++i)
      gauss_node(z + wc * steps_[i], wc, p * probs_[i], t, sigma, total);
  }

  // E[phi(y + w Z')] with phi(y) = exp(-(y / sigma)^2), by Taylor expansion
  // using the physicists' Hermite recursion for the derivatives.
  double taylor_gauss(double y, double w, double sigma) const {
    const double x = y / sigma;
    const double g = std::exp(-x * x);
    double hprev = 1.0, h = 2.0 * x;
    double sum = moments_[0];
    double scale = 1.0;  // (-w / sigma)^m / m!
    for (int m = 1; m <= 8; ++m) {
      scale *= -w / sigma / m;
      sum += scale * h * moments_[m];
      const double next = 2.0 * x * h - 2.0 * m * hprev;
      hprev = h;
      h = next;
    }
    return g * sum;
  }

  DigitAxis axis_;
  std::vector<double> steps_;
  std::vector<double> probs_;
  double half_span_ = 0.0;
  std::vector<double> moments_;
};

}  // namespace kuzlab

#endif  // KUZLAB_DIGIT_LAW_HPP_
