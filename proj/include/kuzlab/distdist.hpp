#ifndef KUZLAB_DISTDIST_HPP_
#define KUZLAB_DISTDIST_HPP_

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "kuzlab/digit_law.hpp"
#include "kuzlab/error.hpp"
#include "kuzlab/io.hpp"
#include "kuzlab/measures.hpp"
#include "kuzlab/parallel.hpp"
#include "kuzlab/quadrature.hpp"
#include "kuzlab/rng.hpp"
#include "kuzlab/specfun.hpp"

namespace kuzlab {

struct ProfileBlock {
  double rBreak = 1.0;
  double level = 1.0;
};

struct EmpiricalData {
  std::vector<double> distances;  // sorted
  std::size_t pairCount = 0;
  std::uint64_t seed = 0;
};

// Single digit axis (all other axes normal) with strong separation.
struct RenewalData {
  DigitAxis axis;
  std::shared_ptr<const DigitDifferenceLaw> law;
  double rStar = 0.0;             // F(r) = F(b r) / |D| for r < rStar
  std::vector<double> tableR;     // one log-period [rStar / b, rStar]
  std::vector<double> tableF;
};

// F(r) = level(r) r^s. Block i carries level_i on (rBreak_{i+1}, rBreak_i];
// the last block extends to 0. Between blocks log(level) is interpolated
// linearly over one decade centred on the breakpoint.
struct SyntheticData {
  std::vector<ProfileBlock> blocks;
};

// Closed-form profile of a Fourier-weighted (or plain Lebesgue) subtorus
// measure: F(r) = vol(B^s) r^s (1 + sum a_m^2/2 m_s(2 pi |k_m| r)) for r <= 1/2.
struct AnalyticData {
  int s = 1;
  std::vector<FourierMode> modes;
};

struct DistanceProfile {
  using Variant = std::variant<EmpiricalData, RenewalData, SyntheticData, AnalyticData>;
  Variant data;
  double sMeta = 1.0;
  double massSquared = 1.0;
  double diam = 0.5;

  double F(double r) const;
  std::string kind() const {
    static const char *names[] = {"empirical", "renewal", "synthetic", "analytic"};
    return names[data.index()];
  }
};

struct EnergyEstimate {
  double u = 0.0;
  double value = 0.0;
  std::string method;
  std::optional<double> stderr_;
};

struct DensityWindow {
  double aMinus = 0.0;
  double aPlus = 0.0;
};

// ---------------------------------------------------------------------------

namespace detail {

inline double synthetic_log_level(const SyntheticData &d, double r) {
  const auto &b = d.blocks;
  const double x = std::log(r);
  const double h = 0.5 * std::log(10.0);
  std::size_t i = 0;
  while (i + 1 < b.size() && r <= b[i + 1].rBreak) ++i;
  // r lies in block i; check the ramps at its two ends.
  if (i + 1 < b.size()) {
    const double xb = std::log(b[i + 1].rBreak);
    if (x < xb + h) {
      const double w = (x - (xb - h)) / (2.0 * h);
      return (1.0 - w) * std::log(b[i + 1].level) + w * std::log(b[i].level);
    }
  }
  if (i >= 1) {
    const double xb = std::log(b[i].rBreak);
    if (x > xb - h) {
      const double w = (x - (xb - h)) / (2.0 * h);
      return (1.0 - w) * std::log(b[i].level) + w * std::log(b[i - 1].level);
    }
  }
  return std::log(b[i].level);
}

inline double analytic_weight_sum(const AnalyticData &d, double r) {
  double q = 1.0;
  for (const auto &m : d.modes) {
    const double kn = std::sqrt(lattice_norm_squared(m.k));
    q += 0.5 * m.amplitude * m.amplitude * ball_multiplier(d.s, 2.0 * std::numbers::pi * kn * r);
  }
  return q;
}

// Fourier transform at k of the indicator of the torus ball of radius r in T^2
// (the disk clipped to the fundamental square).
inline double clipped_disk_transform(const LatticeVector &k, double r) {
  const double pi = std::numbers::pi;
  auto inner = [&](double z1) {
    const double h = std::min(0.5, std::sqrt(std::max(0.0, r * r - z1 * z1)));
    const double i2 = k[1] == 0 ? 2.0 * h : std::sin(2.0 * pi * k[1] * h) / (pi * k[1]);
    return std::cos(2.0 * pi * k[0] * z1) * i2;
  };
  const double zc = std::sqrt(std::max(0.0, r * r - 0.25));
  const double zmax = std::min(0.5, r);
  const auto kmax = static_cast<double>(std::max(std::abs(k[0]), std::abs(k[1])));
  const std::size_t panels = std::max<std::size_t>(400, static_cast<std::size_t>(8 * kmax));
  return 2.0 * integrate_with_breaks(inner, {0.0, std::min(zc, zmax), zmax}, panels);
}

inline double analytic_F(const DistanceProfile &p, const AnalyticData &d, double r) {
  const double top = 0.5 * std::sqrt(static_cast<double>(d.s));
  if (r >= top) return p.massSquared;
  if (r <= 0.5) return ball_volume(d.s) * std::pow(r, d.s) * analytic_weight_sum(d, r);
  if (d.s == 1) return p.massSquared;
  require(d.s == 2, "analytic profile beyond r = 1/2 is implemented for s <= 2 only");
  double total = clipped_disk_transform({0, 0}, r);
  for (const auto &m : d.modes)
    total += 2.0 * 0.25 * m.amplitude * m.amplitude * clipped_disk_transform(m.k, r);
  return std::min(total, p.massSquared);
}

}  // namespace detail

inline double DistanceProfile::F(double r) const {
  if (r <= 0.0) return 0.0;
  return std::visit(
      [&](const auto &d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, EmpiricalData>) {
          const auto it = std::upper_bound(d.distances.begin(), d.distances.end(), r);
          return massSquared * static_cast<double>(it - d.distances.begin()) /
                 static_cast<double>(d.pairCount);
        } else if constexpr (std::is_same_v<T, RenewalData>) {
          if (r >= 0.5) return massSquared;
          double factor = 1.0;
          const double nd = static_cast<double>(d.axis.digits.size());
          while (r < d.rStar) {
            r *= d.axis.base;
            factor /= nd;
          }
          return massSquared * factor * d.law->cdf(r);
        } else if constexpr (std::is_same_v<T, SyntheticData>) {
          if (r >= diam) return massSquared;
          return std::exp(detail::synthetic_log_level(d, r)) * std::pow(r, sMeta);
        } else {
          return detail::analytic_F(*this, d, r);
        }
      },
      data);
}

// ---------------------------------------------------------------------------
// Profile construction.

namespace detail {

inline std::vector<double> sample_pair_distances(const MeasureModel &mu, std::size_t pairs,
                                                 std::uint64_t seed, StreamPurpose purpose) {
  const int n = mu.ambient_dimension();
  constexpr std::size_t kChunk = 1 << 16;
  const std::size_t chunks = (pairs + kChunk - 1) / kChunk;
  auto parts = map_chunks<std::vector<double>>(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(pairs, lo + kChunk);
    std::vector<double> out;
    out.reserve(hi - lo);
    std::vector<double> x(n), y(n);
    for (std::size_t i = lo; i < hi; ++i) {
      RandomStream rng(seed, stream_id(purpose, i));
      sample_point(mu, rng, x.data());
      sample_point(mu, rng, y.data());
      double d2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double d = circle_distance(x[j], y[j]);
        d2 += d * d;
      }
      out.push_back(std::sqrt(d2));
    }
    return out;
  });
  std::vector<double> all;
  all.reserve(pairs);
  for (auto &p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

}  // namespace detail

inline DistanceProfile empirical_profile(const MeasureModel &mu, std::size_t pairCount,
                                         std::uint64_t seed) {
  detail::require(pairCount >= 1000, "empirical_profile: pairCount must be >= 1000");
  EmpiricalData d;
  d.distances = detail::sample_pair_distances(mu, pairCount, seed, StreamPurpose::kPairs);
  std::sort(d.distances.begin(), d.distances.end());
  d.pairCount = pairCount;
  d.seed = seed;
  DistanceProfile p;
  p.data = std::move(d);
  p.sMeta = mu.growth_dimension();
  const double m = total_mass(mu);
  p.massSquared = m * m;
  p.diam = torus_diameter(mu.ambient_dimension());
  return p;
}

// rGrid: radii at which the one-period table is recorded; those outside
// [rStar / b, rStar] are ignored. An empty grid selects 40 log-uniform points.
inline DistanceProfile renewal_profile(const MeasureModel &mu, const std::vector<double> &rGrid = {}) {
  const auto *ds = std::get_if<DigitSelfSimilar>(&mu.variant());
  detail::require(ds != nullptr && ds->axes.size() == 1 &&
                      std::holds_alternative<DigitAxis>(ds->axes[0]),
                  "renewal_profile: requires a single digit axis with all other axes normal");
  const auto &axis = std::get<DigitAxis>(ds->axes[0]);
  RenewalData d;
  d.axis = axis;
  d.rStar = digit_renewal_threshold(axis);
  detail::require(d.rStar > 0.0,
                  "renewal_profile: measure is not strongly separated on the circle "
                  "(scale * span must be < 1)");
  d.law = std::make_shared<DigitDifferenceLaw>(axis);
  std::vector<double> grid;
  const double lo = d.rStar / axis.base;
  for (double r : rGrid)
    if (r >= lo && r <= d.rStar) grid.push_back(r);
  if (grid.empty()) grid = log_grid(lo, d.rStar, 40);
  for (double r : grid) {
    d.tableR.push_back(r);
    d.tableF.push_back(d.law->cdf(r));
  }
  DistanceProfile p;
  p.data = std::move(d);
  p.sMeta = digit_axis_dimension(axis);
  p.massSquared = 1.0;
  p.diam = torus_diameter(mu.ambient_dimension());
  return p;
}

inline DistanceProfile synthetic_profile(const std::vector<ProfileBlock> &blocks, double s) {
  detail::require_config(s > 0, "synthetic_profile: s must be positive");
  detail::require_config(!blocks.empty(), "synthetic_profile: need at least one block");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    detail::require_config(blocks[i].rBreak > 0 && std::isfinite(blocks[i].rBreak),
                           "synthetic_profile: breakpoints must be positive");
    detail::require_config(blocks[i].level > 0 && std::isfinite(blocks[i].level),
                           "synthetic_profile: levels must be positive and finite");
    if (i == 0) continue;
    const double ratio = blocks[i - 1].rBreak / blocks[i].rBreak;
    detail::require_config(ratio > 1.0, "synthetic_profile: breakpoints must strictly decrease");
    detail::require_config(ratio >= (i == 1 ? std::sqrt(10.0) : 10.0) * (1 - 1e-12),
                           "synthetic_profile: breakpoints must be at least one decade apart");
    const double rise = std::log(blocks[i].level / blocks[i - 1].level) / std::log(10.0);
    detail::require_config(rise <= s + 1e-12,
                           "synthetic_profile: level drop at a breakpoint would make F decrease");
  }
  DistanceProfile p;
  p.data = SyntheticData{blocks};
  p.sMeta = s;
  p.diam = blocks.front().rBreak;
  p.massSquared = blocks.front().level * std::pow(p.diam, s);
  return p;
}

inline DistanceProfile analytic_profile(const MeasureModel &mu) {
  AnalyticData d;
  int n = 0;
  if (const auto *l = std::get_if<SubtorusLebesgue>(&mu.variant())) {
    d.s = l->s;
    n = l->n;
  } else if (const auto *f = std::get_if<FourierWeighted>(&mu.variant())) {
    d.s = f->base.s;
    d.modes = f->modes;
    n = f->base.n;
  } else {
    throw DomainError("analytic_profile: requires a subtorus or Fourier-weighted measure");
  }
  detail::require(d.s >= 1, "analytic_profile: requires s >= 1");
  DistanceProfile p;
  p.data = std::move(d);
  p.sMeta = std::get<AnalyticData>(p.data).s;
  p.massSquared = 1.0;
  p.diam = torus_diameter(n);
  return p;
}

// ---------------------------------------------------------------------------
// Evaluation.

inline double normalized_coefficient(const DistanceProfile &F, double r) {
  detail::require(r > 0, "normalized_coefficient: r must be positive");
  return F.F(r) / std::pow(r, F.sMeta);
}

namespace detail {

inline double max_mode_frequency(const DistanceProfile &F) {
  double k = 0.0;
  if (const auto *a = std::get_if<AnalyticData>(&F.data))
    for (const auto &m : a->modes) k = std::max(k, std::sqrt(lattice_norm_squared(m.k)));
  return k;
}

}  // namespace detail

// G(t) = integral of exp(-r^2/4t) dF(r). `panels` = 0 picks the resolution
// automatically; larger values refine the quadrature for profiles evaluated
// by integration by parts.
inline double gaussian_average(const DistanceProfile &F, double t, std::size_t panels = 0) {
  detail::require(t > 0, "gaussian_average: t must be positive");
  if (const auto *e = std::get_if<EmpiricalData>(&F.data)) {
    double acc = 0.0;
    for (double d : e->distances) acc += std::exp(-d * d / (4.0 * t));
    return F.massSquared * acc / static_cast<double>(e->pairCount);
  }
  if (const auto *r = std::get_if<RenewalData>(&F.data))
    return F.massSquared * r->law->gaussian_expectation(t);

  const double st = std::sqrt(t);
  const double umax = std::min(40.0, F.diam / st);
  std::vector<double> breaks{0.0, umax};
  auto add_break = [&](double rr) {
    const double u = rr / st;
    if (u > 0 && u < umax) breaks.push_back(u);
  };
  if (const auto *s = std::get_if<SyntheticData>(&F.data)) {
    for (std::size_t i = 1; i < s->blocks.size(); ++i) {
      add_break(s->blocks[i].rBreak / std::sqrt(10.0));
      add_break(s->blocks[i].rBreak * std::sqrt(10.0));
    }
  } else {
    add_break(0.5);
  }
  if (panels == 0) {
    const double osc = detail::max_mode_frequency(F) * st * umax;
    panels = std::max<std::size_t>(2000, static_cast<std::size_t>(4.0 * osc));
  }
  auto integrand = [&](double u) { return 0.5 * u * std::exp(-0.25 * u * u) * F.F(st * u); };
  double g = integrate_with_breaks(integrand, breaks, panels);
  if (umax < 40.0) g += F.massSquared * std::exp(-F.diam * F.diam / (4.0 * t));
  return g;
}

inline DensityWindow density_window(const DistanceProfile &F, double rMin, double rMax,
                                    std::size_t points = 200) {
  detail::require(rMin > 0 && rMin < rMax, "density_window: need 0 < rMin < rMax");
  points = std::max<std::size_t>(points, 200);
  DensityWindow w{INFINITY, -INFINITY};
  for (double r : log_grid(rMin, rMax, points)) {
    const double a = normalized_coefficient(F, r);
    w.aMinus = std::min(w.aMinus, a);
    w.aPlus = std::max(w.aPlus, a);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Riesz energies.

namespace detail {

// integral of u r^{-u-1} F(r) over [a, b] in the variable x = log r.
inline double layercake_segment(const DistanceProfile &F, double u, double a, double b,
                                std::vector<double> breaks_r, std::size_t panels) {
  if (b <= a) return 0.0;
  std::vector<double> bx{std::log(a), std::log(b)};
  for (double r : breaks_r)
    if (r > a && r < b) bx.push_back(std::log(r));
  auto f = [&](double x) {
    const double r = std::exp(x);
    return u * std::exp(-u * x) * F.F(r);
  };
  return integrate_with_breaks(f, bx, panels);
}

}  // namespace detail

inline EnergyEstimate riesz_energy_layercake(const DistanceProfile &F, double u) {
  detail::require(u > 0 && u < F.sMeta,
                  "riesz_energy_layercake: requires 0 < u < s (energy may diverge)");
  const double D = F.diam;
  const double s = F.sMeta;
  double value = F.massSquared * std::pow(D, -u);

  if (const auto *e = std::get_if<EmpiricalData>(&F.data)) {
    // Exact step-function integral above r0, fitted power law below.
    const std::size_t k0 = std::min(e->pairCount - 1,
                                    std::max<std::size_t>(100, e->pairCount / 10000));
    const double r0 = e->distances[k0];
    const double w = F.massSquared / static_cast<double>(e->pairCount);
    const double Dmu = std::pow(D, -u);
    for (double d : e->distances) value += w * (std::pow(std::max(d, r0), -u) - Dmu);
    value += F.F(r0) * std::pow(r0, -u) * u / (s - u);
  } else if (const auto *rn = std::get_if<RenewalData>(&F.data)) {
    const double b = rn->axis.base;
    const double nd = static_cast<double>(rn->axis.digits.size());
    const double base = detail::layercake_segment(F, u, rn->rStar / b, rn->rStar, {}, 4000);
    value += base / (1.0 - std::pow(b, u) / nd);
    value += detail::layercake_segment(F, u, rn->rStar, 0.5, {}, 4000);
    if (D > 0.5) value += F.massSquared * (std::pow(0.5, -u) - std::pow(D, -u));
  } else {
    double rLow = 1e-8;
    double level = 0.0;
    std::vector<double> breaks;
    std::size_t panels = 4000;
    if (const auto *sy = std::get_if<SyntheticData>(&F.data)) {
      rLow = sy->blocks.back().rBreak / 100.0;
      level = sy->blocks.back().level;
      for (std::size_t i = 1; i < sy->blocks.size(); ++i) {
        breaks.push_back(sy->blocks[i].rBreak / std::sqrt(10.0));
        breaks.push_back(sy->blocks[i].rBreak * std::sqrt(10.0));
      }
    } else {
      level = F.F(rLow) / std::pow(rLow, s);
      breaks.push_back(0.5);
      panels = std::max<std::size_t>(panels, static_cast<std::size_t>(8 * detail::max_mode_frequency(F)));
    }
    value += level * u * std::pow(rLow, s - u) / (s - u);
    value += detail::layercake_segment(F, u, rLow, D, breaks, panels);
  }
  return {u, value, "layercake", std::nullopt};
}

inline EnergyEstimate riesz_energy_montecarlo(const MeasureModel &mu, double u,
                                              std::size_t pairCount, std::uint64_t seed) {
  detail::require(u > 0 && u < mu.growth_dimension(),
                  "riesz_energy_montecarlo: requires 0 < u < dimension");
  detail::require(pairCount >= 10000, "riesz_energy_montecarlo: pairCount must be >= 1e4");
  const auto d = detail::sample_pair_distances(mu, pairCount, seed, StreamPurpose::kEnergy);
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : d) {
    detail::require(v > 0.0, "riesz_energy_montecarlo: coincident sample pair");
    const double x = std::pow(v, -u);
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  const double mass = total_mass(mu);
  const double var = m2 / static_cast<double>(k - 1);
  return {u, mass * mass * mean, "montecarlo",
          mass * mass * std::sqrt(var / static_cast<double>(k))};
}

// ---------------------------------------------------------------------------

inline void write_profile_csv(std::ostream &out, const DistanceProfile &F,
                              const std::vector<double> &grid) {
  CsvWriter w(out, {"r", "F", "a"});
  for (double r : grid) w.row({r, F.F(r), normalized_coefficient(F, r)});
}

}  // namespace kuzlab

#endif  // KUZLAB_DISTDIST_HPP_
