#ifndef KUZLAB_TORUS_HPP_
#define KUZLAB_TORUS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kuzlab/error.hpp"

namespace kuzlab {

// A point of the unit flat torus R^n / Z^n, coordinates reduced to [0, 1).
struct TorusPoint {
  std::vector<double> coords;
};

using LatticeVector = std::vector<std::int64_t>;

inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

// Distance between two circle coordinates, in [0, 1/2].
inline double circle_distance(double a, double b) {
  const double d = std::abs(wrap_unit(a) - wrap_unit(b));
  return std::min(d, 1.0 - d);
}

inline double torus_distance_squared(const TorusPoint &x, const TorusPoint &y) {
  detail::require(x.coords.size() == y.coords.size(),
                  "torus_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.coords.size(); ++i) {
    const double d = circle_distance(x.coords[i], y.coords[i]);
    sum += d * d;
  }
  return sum;
}

inline double torus_distance(const TorusPoint &x, const TorusPoint &y) {
  return std::sqrt(torus_distance_squared(x, y));
}

inline double torus_diameter(int n) { return 0.5 * std::sqrt(static_cast<double>(n)); }

// Range [min, max] of circle_distance(x, y) over y in the arc [lo, hi]
// (hi - lo <= 1, taken modulo 1).
struct DistanceRange {
  double lo;
  double hi;
};

inline DistanceRange circle_distance_range(double x, double lo, double hi) {
  if (hi - lo >= 1.0) return {0.0, 0.5};
  // Offset of x from the arc start, in [0, 1).
  const double off = wrap_unit(x - lo);
  const double len = hi - lo;
  const double dlo = circle_distance(x, lo);
  const double dhi = circle_distance(x, hi);
  const double near = off <= len ? 0.0 : std::min(dlo, dhi);
  // The antipode x + 1/2 lies in the arc iff the farthest point is 1/2 away.
  const double anti = wrap_unit(x + 0.5 - lo);
  const double far = anti <= len ? 0.5 : std::max(dlo, dhi);
  return {near, far};
}

inline double lattice_norm_squared(const LatticeVector &k) {
  double s = 0.0;
  for (auto v : k) s += static_cast<double>(v) * static_cast<double>(v);
  return s;
}

}  // namespace kuzlab

#endif  // KUZLAB_TORUS_HPP_
