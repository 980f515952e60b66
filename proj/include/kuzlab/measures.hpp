#ifndef KUZLAB_MEASURES_HPP_
#define KUZLAB_MEASURES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kuzlab/error.hpp"
#include "kuzlab/rng.hpp"
#include "kuzlab/specfun.hpp"
#include "kuzlab/torus.hpp"

namespace kuzlab {

// Conventions shared by every model on T^n: the tangential axes are the first
// coordinates, the remaining (normal) coordinates are pinned at normal_offset.

// Lebesgue measure of the coordinate subtorus T^s x {normal_offset}. s = 0 is
// the unit point mass at normal_offset, s = n the ambient volume measure.
struct SubtorusLebesgue {
  int n = 2;
  int s = 1;
  std::vector<double> normal_offset;
};

struct FullAxis {};

// Self-similar digit measure on one axis: x = scale * sum_j d_j base^{-j} with
// d_j i.i.d. uniform on `digits`.
struct DigitAxis {
  int base = 3;
  std::vector<int> digits{0, 2};
  double scale = 1.0;
};

using AxisSpec = std::variant<FullAxis, DigitAxis>;

struct DigitSelfSimilar {
  int n = 2;
  std::vector<AxisSpec> axes;
  std::vector<double> normal_offset;
};

struct FourierMode {
  LatticeVector k;  // in Z^s, tangential
  double amplitude = 0.0;
};

// w dV_H with w = 1 + sum_m a_m cos(2 pi k_m . x) on the base subtorus.
struct FourierWeighted {
  SubtorusLebesgue base;
  std::vector<FourierMode> modes;
};

class MeasureModel;

struct Mixture {
  std::vector<MeasureModel> components;
};

class MeasureModel {
 public:
  using Variant =
      std::variant<SubtorusLebesgue, DigitSelfSimilar, FourierWeighted, Mixture>;

  MeasureModel(SubtorusLebesgue m) : v_(std::move(m)) { validate(); }
  MeasureModel(DigitSelfSimilar m) : v_(std::move(m)) { validate(); }
  MeasureModel(FourierWeighted m) : v_(std::move(m)) { validate(); }
  MeasureModel(Mixture m) : v_(std::move(m)) { validate(); }

  const Variant &variant() const { return v_; }
  int ambient_dimension() const;
  // Hausdorff dimension (the largest component dimension for mixtures).
  double dimension() const;
  // Dimension that governs spectral growth: the smallest component dimension.
  double growth_dimension() const;
  std::string describe() const;

 private:
  void validate() const;
  Variant v_;
};

// ---------------------------------------------------------------------------
// Digit axis helpers.

inline double digit_axis_dimension(const DigitAxis &a) {
  return std::log(static_cast<double>(a.digits.size())) /
         std::log(static_cast<double>(a.base));
}

// Length of the support hull divided by `scale`.
inline double digit_axis_span(const DigitAxis &a) {
  const auto [lo, hi] = std::minmax_element(a.digits.begin(), a.digits.end());
  return static_cast<double>(*hi - *lo) / static_cast<double>(a.base - 1);
}

inline double digit_axis_offset(const DigitAxis &a) {
  const int lo = *std::min_element(a.digits.begin(), a.digits.end());
  return a.scale * static_cast<double>(lo) / static_cast<double>(a.base - 1);
}

// Radius below which every pair at torus distance <= r shares its first
// digit. Zero when the support wraps onto itself around the circle.
inline double digit_renewal_threshold(const DigitAxis &a) {
  const double span = digit_axis_span(a);
  if (a.scale * span >= 1.0) return 0.0;
  return std::min(a.scale * (2.0 - span), 1.0 - a.scale * span) /
         static_cast<double>(a.base);
}

inline int digit_truncation_depth(const DigitAxis &a, double k) {
  const double lb = std::log(static_cast<double>(a.base));
  const double ak = std::abs(k) * std::max(1.0, a.scale);
  if (ak == 0.0) return 0;
  const double need = std::log(2.0 * std::numbers::pi * ak) / lb + 40.0 / lb;
  return std::max(40, static_cast<int>(std::ceil(need)));
}

// Fourier coefficient of one digit axis: prod_{j<=depth} mean_d e^{-2 pi i k
// scale d b^{-j}}. depth < 0 selects the default truncation.
inline std::complex<double> digit_axis_coefficient(const DigitAxis &a, double k,
                                                   int depth = -1) {
  if (k == 0.0) return {1.0, 0.0};
  if (depth < 0) depth = digit_truncation_depth(a, k);
  const double inv = 1.0 / static_cast<double>(a.digits.size());
  std::complex<double> prod{1.0, 0.0};
  double freq = 2.0 * std::numbers::pi * k * a.scale;
  for (int j = 1; j <= depth; ++j) {
    freq /= static_cast<double>(a.base);
    std::complex<double> f{0.0, 0.0};
    for (int d : a.digits) {
      const double ph = freq * d;
      f += std::complex<double>(std::cos(ph), -std::sin(ph));
    }
    prod *= f * inv;
  }
  return prod;
}

// ---------------------------------------------------------------------------

inline int MeasureModel::ambient_dimension() const {
  return std::visit(
      [](const auto &m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) return m.n;
        else if constexpr (std::is_same_v<T, DigitSelfSimilar>) return m.n;
        else if constexpr (std::is_same_v<T, FourierWeighted>) return m.base.n;
        else return m.components.front().ambient_dimension();
      },
      v_);
}

inline double MeasureModel::dimension() const {
  return std::visit(
      [](const auto &m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) return m.s;
        else if constexpr (std::is_same_v<T, FourierWeighted>) return m.base.s;
        else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
          double s = 0.0;
          for (const auto &ax : m.axes)
            s += std::holds_alternative<FullAxis>(ax)
                     ? 1.0
                     : digit_axis_dimension(std::get<DigitAxis>(ax));
          return s;
        } else {
          double s = 0.0;
          for (const auto &c : m.components) s = std::max(s, c.dimension());
          return s;
        }
      },
      v_);
}

inline double MeasureModel::growth_dimension() const {
  if (const auto *mix = std::get_if<Mixture>(&v_)) {
    double s = mix->components.front().growth_dimension();
    for (const auto &c : mix->components) s = std::min(s, c.growth_dimension());
    return s;
  }
  return dimension();
}

inline std::string MeasureModel::describe() const {
  return std::visit(
      [](const auto &m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>)
          return "subtorus(n=" + std::to_string(m.n) + ",s=" + std::to_string(m.s) + ")";
        else if constexpr (std::is_same_v<T, DigitSelfSimilar>)
          return "digit(n=" + std::to_string(m.n) + ",axes=" + std::to_string(m.axes.size()) + ")";
        else if constexpr (std::is_same_v<T, FourierWeighted>)
          return "fourier(n=" + std::to_string(m.base.n) + ",s=" + std::to_string(m.base.s) +
                 ",modes=" + std::to_string(m.modes.size()) + ")";
        else
          return "mixture(" + std::to_string(m.components.size()) + ")";
      },
      v_);
}

namespace detail {

inline void validate_offsets(int n, int tangential, const std::vector<double> &off) {
  require_config(n >= 1, "ambient dimension n must be >= 1");
  require_config(tangential >= 0 && tangential <= n,
                 "tangential dimension must lie in [0, n]");
  require_config(static_cast<int>(off.size()) == n - tangential,
                 "normal_offset must have n - s entries");
  for (double o : off)
    require_config(std::isfinite(o) && o >= 0.0 && o < 1.0,
                   "normal_offset entries must lie in [0, 1)");
}

inline void validate_digit_axis(const DigitAxis &a) {
  require_config(a.base >= 3, "digit axis base must be >= 3");
  require_config(a.digits.size() >= 2, "digit set needs at least two digits");
  std::vector<int> d = a.digits;
  std::sort(d.begin(), d.end());
  for (int v : d)
    require_config(v >= 0 && v < a.base, "digits must lie in {0, ..., base-1}");
  for (std::size_t i = 1; i < d.size(); ++i)
    require_config(d[i] - d[i - 1] >= 2, "digit gaps must be >= 2");
  require_config(a.scale > 0.0 && a.scale <= 1.0, "digit axis scale must lie in (0, 1]");
}

}  // namespace detail

inline void MeasureModel::validate() const {
  std::visit(
      [](const auto &m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) {
          detail::validate_offsets(m.n, m.s, m.normal_offset);
        } else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
          detail::require_config(!m.axes.empty(), "digit measure needs at least one axis");
          detail::validate_offsets(m.n, static_cast<int>(m.axes.size()), m.normal_offset);
          for (const auto &ax : m.axes)
            if (const auto *d = std::get_if<DigitAxis>(&ax)) detail::validate_digit_axis(*d);
        } else if constexpr (std::is_same_v<T, FourierWeighted>) {
          detail::validate_offsets(m.base.n, m.base.s, m.base.normal_offset);
          detail::require_config(m.base.s >= 1, "fourier-weighted base needs s >= 1");
          double total = 0.0;
          for (std::size_t i = 0; i < m.modes.size(); ++i) {
            const auto &md = m.modes[i];
            detail::require_config(static_cast<int>(md.k.size()) == m.base.s,
                                   "mode frequency must have s entries");
            detail::require_config(lattice_norm_squared(md.k) > 0, "mode frequency must be nonzero");
            detail::require_config(md.amplitude > 0, "mode amplitudes must be positive");
            total += md.amplitude;
            for (std::size_t j = 0; j < i; ++j) {
              const auto &o = m.modes[j];
              detail::require_config(lattice_norm_squared(o.k) != lattice_norm_squared(md.k),
                                     "mode frequencies must have distinct norms");
            }
          }
          detail::require_config(total <= 0.25 + 1e-15, "sum of mode amplitudes must be <= 1/4");
        } else {
          detail::require_config(!m.components.empty(), "mixture needs components");
          const int n = m.components.front().ambient_dimension();
          for (const auto &c : m.components)
            detail::require_config(c.ambient_dimension() == n,
                                   "mixture components must share the ambient dimension");
        }
      },
      v_);
}

// ---------------------------------------------------------------------------
// Total mass and Fourier coefficients.

inline double total_mass(const MeasureModel &mu) {
  if (const auto *mix = std::get_if<Mixture>(&mu.variant())) {
    double m = 0.0;
    for (const auto &c : mix->components) m += total_mass(c);
    return m;
  }
  return 1.0;
}

namespace detail {

inline std::complex<double> normal_phase(const std::vector<double> &offset,
                                         const LatticeVector &k, std::size_t first) {
  double ph = 0.0;
  for (std::size_t j = 0; j < offset.size(); ++j)
    ph += static_cast<double>(k[first + j]) * offset[j];
  ph *= -2.0 * std::numbers::pi;
  return {std::cos(ph), std::sin(ph)};
}

inline bool tangential_zero(const LatticeVector &k, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    if (k[i] != 0) return false;
  return true;
}

// Tangential coefficient of the density w at k' (first s entries of k).
inline double fourier_weight_coefficient(const FourierWeighted &m, const LatticeVector &k) {
  const auto s = static_cast<std::size_t>(m.base.s);
  if (tangential_zero(k, s)) return 1.0;
  for (const auto &md : m.modes) {
    bool plus = true, minus = true;
    for (std::size_t i = 0; i < s; ++i) {
      plus = plus && k[i] == md.k[i];
      minus = minus && k[i] == -md.k[i];
    }
    if (plus || minus) return 0.5 * md.amplitude;
  }
  return 0.0;
}

}  // namespace detail

// mu^(k) = integral of e^{-2 pi i k.x} d mu(x).
inline std::complex<double> fourier_coefficient(const MeasureModel &mu, const LatticeVector &k) {
  detail::require(static_cast<int>(k.size()) == mu.ambient_dimension(),
                  "fourier_coefficient: lattice vector has wrong dimension");
  return std::visit(
      [&](const auto &m) -> std::complex<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) {
          if (!detail::tangential_zero(k, m.s)) return {0.0, 0.0};
          return detail::normal_phase(m.normal_offset, k, m.s);
        } else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
          std::complex<double> c{1.0, 0.0};
          for (std::size_t i = 0; i < m.axes.size(); ++i) {
            if (std::holds_alternative<FullAxis>(m.axes[i])) {
              if (k[i] != 0) return {0.0, 0.0};
            } else {
              c *= digit_axis_coefficient(std::get<DigitAxis>(m.axes[i]),
                                          static_cast<double>(k[i]));
            }
          }
          return c * detail::normal_phase(m.normal_offset, k, m.axes.size());
        } else if constexpr (std::is_same_v<T, FourierWeighted>) {
          const double w = detail::fourier_weight_coefficient(m, k);
          if (w == 0.0) return {0.0, 0.0};
          return w * detail::normal_phase(m.base.normal_offset, k, m.base.s);
        } else {
          std::complex<double> c{0.0, 0.0};
          for (const auto &comp : m.components) c += fourier_coefficient(comp, k);
          return c;
        }
      },
      mu.variant());
}

// ---------------------------------------------------------------------------
// Sampling.

namespace detail {

// Draws uniform digit indices from 64-bit words.
class DigitSource {
 public:
  DigitSource(RandomStream &rng, std::uint64_t radix) : rng_(rng), radix_(radix) {
    long double cap = 1.0L;
    while (cap * radix_ <= 18446744073709551615.0L) {
      cap *= radix_;
      ++per_word_;
    }
  }
  std::uint64_t next() {
    if (left_ == 0) {
      word_ = rng_.next_u64();
      left_ = per_word_;
    }
    const std::uint64_t d = word_ % radix_;
    word_ /= radix_;
    --left_;
    return d;
  }

 private:
  RandomStream &rng_;
  std::uint64_t radix_;
  int per_word_ = 0;
  int left_ = 0;
  std::uint64_t word_ = 0;
};

inline int sample_depth(int base) {
  return static_cast<int>(std::ceil(52.0 / std::log2(static_cast<double>(base))));
}

inline double sample_digit_axis(const DigitAxis &a, RandomStream &rng) {
  DigitSource src(rng, a.digits.size());
  const int depth = sample_depth(a.base);
  double x = 0.0, w = 1.0;
  for (int j = 0; j < depth; ++j) {
    w /= static_cast<double>(a.base);
    x += static_cast<double>(a.digits[src.next()]) * w;
  }
  return wrap_unit(a.scale * x);
}

inline double fourier_density(const FourierWeighted &m, const double *tangential) {
  double w = 1.0;
  for (const auto &md : m.modes) {
    double ph = 0.0;
    for (int i = 0; i < m.base.s; ++i) ph += static_cast<double>(md.k[i]) * tangential[i];
    w += md.amplitude * std::cos(2.0 * std::numbers::pi * ph);
  }
  return w;
}

// One draw from mu / mu(T^n) written to out[0..n).
inline void sample_point(const MeasureModel &mu, RandomStream &rng, double *out) {
  std::visit(
      [&](const auto &m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) {
          for (int i = 0; i < m.s; ++i) out[i] = rng.uniform();
          for (std::size_t j = 0; j < m.normal_offset.size(); ++j)
            out[m.s + j] = m.normal_offset[j];
        } else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
          for (std::size_t i = 0; i < m.axes.size(); ++i) {
            if (std::holds_alternative<FullAxis>(m.axes[i]))
              out[i] = rng.uniform();
            else
              out[i] = sample_digit_axis(std::get<DigitAxis>(m.axes[i]), rng);
          }
          for (std::size_t j = 0; j < m.normal_offset.size(); ++j)
            out[m.axes.size() + j] = m.normal_offset[j];
        } else if constexpr (std::is_same_v<T, FourierWeighted>) {
          // Rejection against the envelope 5/4 >= w.
          for (;;) {
            for (int i = 0; i < m.base.s; ++i) out[i] = rng.uniform();
            if (1.25 * rng.uniform() <= fourier_density(m, out)) break;
          }
          for (std::size_t j = 0; j < m.base.normal_offset.size(); ++j)
            out[m.base.s + j] = m.base.normal_offset[j];
        } else {
          const double total = total_mass(mu);
          double u = rng.uniform() * total;
          std::size_t pick = m.components.size() - 1;
          for (std::size_t c = 0; c < m.components.size(); ++c) {
            const double w = total_mass(m.components[c]);
            if (u < w) {
              pick = c;
              break;
            }
            u -= w;
          }
          sample_point(m.components[pick], rng, out);
        }
      },
      mu.variant());
}

}  // namespace detail

// `count` i.i.d. draws from the normalized measure. Draw i depends only on
// (seed, i).
inline std::vector<TorusPoint> sample(const MeasureModel &mu, std::uint64_t seed,
                                      std::size_t count) {
  detail::require(count >= 1, "sample: count must be >= 1");
  const int n = mu.ambient_dimension();
  std::vector<TorusPoint> pts(count);
  for (std::size_t i = 0; i < count; ++i) {
    RandomStream rng(seed, stream_id(StreamPurpose::kSample, i));
    pts[i].coords.resize(n);
    detail::sample_point(mu, rng, pts[i].coords.data());
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Ball masses.

namespace detail {

// Volume of the torus ball of radius rho <= 1/2 in T^s (an embedded ball).
inline double embedded_ball_volume(int s, double rho) {
  if (s == 0) return 1.0;
  return ball_volume(s) * std::pow(rho, s);
}

inline double normal_distance_squared(const std::vector<double> &offset,
                                      const TorusPoint &x, std::size_t first) {
  double d2 = 0.0;
  for (std::size_t j = 0; j < offset.size(); ++j) {
    const double d = circle_distance(x.coords[first + j], offset[j]);
    d2 += d * d;
  }
  return d2;
}

struct AxisCell {
  double lo = 0.0;    // hull of the support inside the cell
  double hi = 1.0;
  double base = 0.0;  // digit partial sum (digit axes) or cell start (full)
  double width = 1.0; // cell length: scale * b^{-j} (digit) or 2^{-j} (full)
};

inline std::vector<AxisCell> refine(const AxisSpec &ax, const AxisCell &cell) {
  std::vector<AxisCell> out;
  if (std::holds_alternative<FullAxis>(ax)) {
    const double h = 0.5 * cell.width;
    out.push_back({cell.base, cell.base + h, cell.base, h});
    out.push_back({cell.base + h, cell.base + cell.width, cell.base + h, h});
    return out;
  }
  const auto &a = std::get<DigitAxis>(ax);
  const double w = cell.width / a.base;
  const double span = digit_axis_span(a) * w;
  const double off = digit_axis_offset(a) / a.scale * w;
  for (int d : a.digits) {
    const double b0 = cell.base + d * w;
    out.push_back({b0 + off, b0 + off + span, b0, w});
  }
  return out;
}

}  // namespace detail

// mu(B(x, r)) for the torus geodesic ball, 0 < r <= 1/2.
inline double ball_mass(const MeasureModel &mu, const TorusPoint &x, double r) {
  detail::require(r > 0 && r <= 0.5, "ball_mass: requires 0 < r <= 1/2");
  detail::require(static_cast<int>(x.coords.size()) == mu.ambient_dimension(),
                  "ball_mass: point has wrong dimension");
  return std::visit(
      [&](const auto &m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) {
          const double dn2 = detail::normal_distance_squared(m.normal_offset, x, m.s);
          if (dn2 > r * r) return 0.0;
          return detail::embedded_ball_volume(m.s, std::sqrt(r * r - dn2));
        } else if constexpr (std::is_same_v<T, FourierWeighted>) {
          const double dn2 = detail::normal_distance_squared(m.base.normal_offset, x, m.base.s);
          if (dn2 > r * r) return 0.0;
          const double rho = std::sqrt(r * r - dn2);
          // Ball averages of cos(2 pi k.(x+y)) pick up the multiplier m_s.
          double avg = 1.0;
          for (const auto &md : m.modes) {
            double ph = 0.0;
            for (int i = 0; i < m.base.s; ++i) ph += static_cast<double>(md.k[i]) * x.coords[i];
            const double kn = std::sqrt(lattice_norm_squared(md.k));
            avg += md.amplitude * std::cos(2.0 * std::numbers::pi * ph) *
                   ball_multiplier(m.base.s, 2.0 * std::numbers::pi * kn * rho);
          }
          return detail::embedded_ball_volume(m.base.s, rho) * avg;
        } else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
          const double dn2 = detail::normal_distance_squared(m.normal_offset, x, m.axes.size());
          if (dn2 > r * r) return 0.0;
          // Closed ball; the slack keeps cells whose hull touches the sphere
          // up to rounding (coordinates are O(1), so absolute) on the inside.
          const double reff = std::sqrt(r * r - dn2) * (1.0 + 1e-12) + 4e-15;
          const double r2 = reff * reff;
          // Refinement depth: resolve the ball scale plus extra levels.
          int depth = 0;
          for (const auto &ax : m.axes) {
            if (const auto *d = std::get_if<DigitAxis>(&ax)) {
              const int lvl = static_cast<int>(std::ceil(std::log(d->scale / r) / std::log(d->base)));
              depth = std::max(depth, std::max(lvl, 0) + 12);
            } else {
              depth = std::max(depth, static_cast<int>(std::ceil(std::log2(1.0 / r))) + 12);
            }
          }
          const std::size_t na = m.axes.size();
          std::vector<detail::AxisCell> root(na);
          for (std::size_t i = 0; i < na; ++i) {
            if (const auto *d = std::get_if<DigitAxis>(&m.axes[i])) {
              const double lo = digit_axis_offset(*d);
              root[i] = {lo, lo + d->scale * digit_axis_span(*d), 0.0, d->scale};
            }
          }
          double total = 0.0;
          std::size_t budget = 4'000'000;
          // Depth-first over product cells; mass = product of per-axis masses.
          auto recurse = [&](auto &self, const std::vector<detail::AxisCell> &cells,
                             double mass, int level) -> void {
            double dmin2 = 0.0, dmax2 = 0.0;
            for (std::size_t i = 0; i < na; ++i) {
              const auto rg = circle_distance_range(x.coords[i], cells[i].lo, cells[i].hi);
              dmin2 += rg.lo * rg.lo;
              dmax2 += rg.hi * rg.hi;
            }
            if (dmin2 > r2) return;
            if (dmax2 <= r2) {
              total += mass;
              return;
            }
            if (level >= depth || budget == 0) {
              total += 0.5 * mass;
              return;
            }
            --budget;
            std::vector<std::vector<detail::AxisCell>> kids(na);
            std::vector<double> kid_mass(na);
            for (std::size_t i = 0; i < na; ++i) {
              kids[i] = detail::refine(m.axes[i], cells[i]);
              kid_mass[i] = 1.0 / static_cast<double>(kids[i].size());
            }
            std::vector<std::size_t> idx(na, 0);
            std::vector<detail::AxisCell> next(na);
            for (;;) {
              double w = mass;
              for (std::size_t i = 0; i < na; ++i) {
                next[i] = kids[i][idx[i]];
                w *= kid_mass[i];
              }
              self(self, next, w, level + 1);
              std::size_t i = 0;
              while (i < na && ++idx[i] == kids[i].size()) idx[i++] = 0;
              if (i == na) break;
            }
          };
          recurse(recurse, root, 1.0, 0);
          return total;
        } else {
          double total = 0.0;
          for (const auto &c : m.components) total += ball_mass(c, x, r);
          return total;
        }
      },
      mu.variant());
}

// ---------------------------------------------------------------------------

namespace detail {
inline bool same_support(const MeasureModel &a, const MeasureModel &b) {
  auto key = [](const MeasureModel &m) -> std::optional<std::pair<int, std::vector<double>>> {
    if (const auto *l = std::get_if<SubtorusLebesgue>(&m.variant()))
      return std::make_pair(l->s, l->normal_offset);
    if (const auto *f = std::get_if<FourierWeighted>(&m.variant()))
      return std::make_pair(f->base.s, f->base.normal_offset);
    return std::nullopt;
  };
  const auto ka = key(a), kb = key(b);
  return ka && kb && *ka == *kb;
}
}  // namespace detail

// Closed-form averaged s-density when it exists: vol(H) for subtorus Lebesgue,
// vol(H)(1 + sum a_m^2 / 2) for Fourier-weighted measures, additive over
// equal-dimension mixtures with distinct supports; absent for digit measures.
inline std::optional<double> averaged_density_exact(const MeasureModel &mu) {
  return std::visit(
      [&](const auto &m) -> std::optional<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) {
          if (m.s == 0) return std::nullopt;
          return 1.0;
        } else if constexpr (std::is_same_v<T, FourierWeighted>) {
          double sq = 0.0;
          for (const auto &md : m.modes) sq += md.amplitude * md.amplitude;
          return 1.0 + 0.5 * sq;
        } else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
          for (const auto &ax : m.axes)
            if (!std::holds_alternative<FullAxis>(ax)) return std::nullopt;
          return 1.0;
        } else {
          double sum = 0.0;
          const double s0 = m.components.front().dimension();
          for (std::size_t i = 0; i < m.components.size(); ++i) {
            const auto &c = m.components[i];
            if (c.dimension() != s0) return std::nullopt;
            for (std::size_t j = 0; j < i; ++j)
              if (detail::same_support(c, m.components[j])) return std::nullopt;
            const auto a = averaged_density_exact(c);
            if (!a) return std::nullopt;
            sum += *a;
          }
          return sum;
        }
      },
      mu.variant());
}

// ---------------------------------------------------------------------------
// Frequently used models.

inline MeasureModel make_circle(int n = 2, double offset = 0.5) {
  return SubtorusLebesgue{n, 1, std::vector<double>(n - 1, offset)};
}

// Middle-thirds digit measure on the first axis of T^n. scale = 1 is the
// classical placement on [0, 1], which wraps onto itself at 0 = 1; scale < 1
// keeps the first-level branches strongly separated on the circle.
inline MeasureModel make_cantor_circle(double scale = 0.5, int n = 2, double offset = 0.5) {
  DigitSelfSimilar m;
  m.n = n;
  m.axes = {DigitAxis{3, {0, 2}, scale}};
  m.normal_offset.assign(n - 1, offset);
  return m;
}

}  // namespace kuzlab

#endif  // KUZLAB_MEASURES_HPP_
