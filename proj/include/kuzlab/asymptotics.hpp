#ifndef KUZLAB_ASYMPTOTICS_HPP_
#define KUZLAB_ASYMPTOTICS_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kuzlab/distdist.hpp"
#include "kuzlab/error.hpp"
#include "kuzlab/io.hpp"
#include "kuzlab/measures.hpp"
#include "kuzlab/quadrature.hpp"
#include "kuzlab/spectral.hpp"
#include "kuzlab/specfun.hpp"

namespace kuzlab {

struct ExponentFit {
  double slope = 0.0;
  double halfWidth = 0.0;  // two standard errors
  double intercept = 0.0;
  std::size_t points = 0;
};

// Least-squares slope of log y against log x over x in [lo, hi].
inline ExponentFit fit_loglog(const std::vector<double> &x, const std::vector<double> &y,
                              double lo, double hi) {
  std::vector<double> X, Y;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= lo * (1 - 1e-12) && x[i] <= hi * (1 + 1e-12) && x[i] > 0 && y[i] > 0) {
      X.push_back(std::log(x[i]));
      Y.push_back(std::log(y[i]));
    }
  detail::require(X.size() >= 3, "fit_loglog: fewer than three usable points");
  const double m = static_cast<double>(X.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mx += X[i] / m;
    my += Y[i] / m;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  detail::require(sxx > 0, "fit_loglog: degenerate abscissae");
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = X.size();
  double rss = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double r = Y[i] - f.intercept - f.slope * X[i];
    rss += r * r;
  }
  const double se = X.size() > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  f.halfWidth = 2.0 * se;
  return f;
}

// Slope of log N against log lambda over the final `decades` of the grid.
inline ExponentFit fit_exponent(const KuznecovSeries &S, double decades = 1.5) {
  detail::require(decades > 0, "fit_exponent: window must be positive");
  const double hi = S.grid.back();
  const double lo = hi * std::pow(10.0, -decades);
  std::size_t count = 0;
  for (double l : S.grid) count += (l >= lo * (1 - 1e-12)) ? 1 : 0;
  detail::require(count >= 10, "fit_exponent: fewer than 10 grid points in the window");
  return fit_loglog(S.grid, S.values, lo, hi);
}

inline ExponentFit fit_exponent_range(const KuznecovSeries &S, double lo, double hi) {
  std::size_t count = 0;
  for (double l : S.grid) count += (l >= lo * (1 - 1e-12) && l <= hi * (1 + 1e-12)) ? 1 : 0;
  detail::require(count >= 10, "fit_exponent: fewer than 10 grid points in the window");
  return fit_loglog(S.grid, S.values, lo, hi);
}

// Series built from given values (synthetic data, imported tables).
inline KuznecovSeries make_series(const std::vector<double> &grid, const std::vector<double> &values,
                                  int n, double s, std::optional<double> A = std::nullopt) {
  detail::require(grid.size() == values.size() && !grid.empty(), "make_series: size mismatch");
  KuznecovSeries S;
  S.measure = "table";
  S.n = n;
  S.s = s;
  S.A = A;
  S.grid = grid;
  S.values = values;
  S.smoothed = values;
  S.smoothingHalfWidth = 0.0;
  return S;
}

// ---------------------------------------------------------------------------
// Ratio sweeps and verdicts.

struct VerdictThresholds {
  double converge = 0.005;  // amplitude over the final decade
  double oscillate = 0.02;  // amplitude over each of the last two periods
  double period = 10.0;     // multiplicative log-period of the oscillation
};

struct SweepReport {
  std::vector<double> grid;
  std::vector<double> ratios;          // N / pred (or N / lambda^{n-s})
  std::vector<double> smoothedRatios;  // window-averaged N over the same
  std::vector<double> residuals;       // N - pred, NaN without A
  bool normalized = false;
  ExponentFit exponent;
  double amplitude = 0.0;              // final decade, smoothed ratios
  double lastPeriodAmplitude = 0.0;
  double previousPeriodAmplitude = 0.0;
  double amplitudeChange = 0.0;        // |last - previous| / previous
  std::string verdict;
  VerdictThresholds thresholds;
};

namespace detail {

inline double window_amplitude(const std::vector<double> &grid, const std::vector<double> &v,
                               double lo, double hi) {
  double mn = INFINITY, mx = -INFINITY, sum = 0;
  std::size_t c = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] >= lo * (1 - 1e-12) && grid[i] <= hi * (1 + 1e-12)) {
      mn = std::min(mn, v[i]);
      mx = std::max(mx, v[i]);
      sum += v[i];
      ++c;
    }
  if (c < 2) return NAN;
  return (mx - mn) / (sum / static_cast<double>(c));
}

}  // namespace detail

inline SweepReport ratio_sweep(const KuznecovSeries &S, std::optional<double> A,
                               const VerdictThresholds &th = {}) {
  detail::require(!S.grid.empty(), "ratio_sweep: empty series");
  detail::require(th.period > 1.0, "ratio_sweep: period must exceed 1");
  SweepReport R;
  R.grid = S.grid;
  R.thresholds = th;
  R.normalized = A.has_value();
  const double e = S.n - S.s;
  double scale = 1.0;
  if (A) {
    detail::require(*A > 0, "ratio_sweep: A must be positive");
    scale = constant_bundle(S.n, S.s).Cns * *A;
  }
  for (std::size_t i = 0; i < S.grid.size(); ++i) {
    const double pred = scale * std::pow(S.grid[i], e);
    R.ratios.push_back(S.values[i] / pred);
    R.smoothedRatios.push_back(S.smoothed[i] / pred);
    R.residuals.push_back(A ? S.values[i] - pred : NAN);
  }
  const double hi = S.grid.back();
  R.amplitude = detail::window_amplitude(R.grid, R.smoothedRatios, hi / 10.0, hi);
  R.lastPeriodAmplitude = detail::window_amplitude(R.grid, R.smoothedRatios, hi / th.period, hi);
  R.previousPeriodAmplitude =
      detail::window_amplitude(R.grid, R.smoothedRatios, hi / (th.period * th.period), hi / th.period);
  R.amplitudeChange =
      std::abs(R.lastPeriodAmplitude - R.previousPeriodAmplitude) / R.previousPeriodAmplitude;
  if (R.lastPeriodAmplitude > th.oscillate && R.previousPeriodAmplitude > th.oscillate)
    R.verdict = "oscillates";
  else if (R.amplitude < th.converge)
    R.verdict = "converges";
  else
    R.verdict = "inconclusive";
  std::size_t inWindow = 0;
  for (double l : S.grid) inWindow += l >= hi * std::pow(10.0, -1.5) ? 1 : 0;
  R.exponent = inWindow >= 10 ? fit_exponent(S, 1.5) : fit_loglog(S.grid, S.values, 0.0, hi);
  return R;
}

inline void write_sweep_csv(std::ostream &out, const SweepReport &R) {
  CsvWriter w(out, {"grid", "ratio", "residual"});
  for (std::size_t i = 0; i < R.grid.size(); ++i) w.row({R.grid[i], R.ratios[i], R.residuals[i]});
}

// ---------------------------------------------------------------------------
// Karamata pair.

struct KaramataReport {
  double beta = 0.0;
  double C = 0.0;
  std::vector<double> tGrid, laplace;    // F(t)
  std::vector<double> SGrid, counting;   // N(S)
  double laplaceDeviation = 0.0;         // max |F t^beta / C - 1|, final decade
  double countingDeviation = 0.0;        // max |N S^{-beta} Gamma(beta+1) / C - 1|, final decade
};

namespace detail {

inline double final_decade_deviation(const std::vector<double> &x, const std::vector<double> &ratio,
                                     bool small_end) {
  double dev = 0.0;
  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool in = small_end ? x[i] <= lo * 10.0 * (1 + 1e-12) : x[i] >= hi / 10.0 * (1 - 1e-12);
    if (in) dev = std::max(dev, std::abs(ratio[i] - 1.0));
  }
  return dev;
}

}  // namespace detail

// Both directions for a counting function given in closed form: F(t) is the
// Laplace-Stieltjes transform int e^{-tS} dN(S) = int_0^inf e^{-v} N(v/t) dv,
// integrated in w = sqrt(v).
inline KaramataReport karamata_check(const std::function<double(double)> &counting, double beta,
                                     double C, const std::vector<double> &tGrid,
                                     const std::vector<double> &SGrid) {
  detail::require(beta > 0 && C > 0, "karamata_check: requires beta > 0 and C > 0");
  detail::require(!tGrid.empty() && !SGrid.empty(), "karamata_check: empty grids");
  KaramataReport r;
  r.beta = beta;
  r.C = C;
  r.tGrid = tGrid;
  r.SGrid = SGrid;
  std::vector<double> lr, cr;
  for (double t : tGrid) {
    detail::require(t > 0, "karamata_check: t must be positive");
    auto f = [&](double w) { return 2.0 * w * std::exp(-w * w) * counting(w * w / t); };
    const double F = integrate_with_breaks(f, {0.0, 1.0, 3.0, 9.0}, 4000);
    r.laplace.push_back(F);
    lr.push_back(F * std::pow(t, beta) / C);
  }
  const double c = C / gamma_fn(beta + 1.0);
  for (double S : SGrid) {
    const double N = counting(S);
    r.counting.push_back(N);
    cr.push_back(N * std::pow(S, -beta) / c);
  }
  r.laplaceDeviation = detail::final_decade_deviation(tGrid, lr, true);
  r.countingDeviation = detail::final_decade_deviation(SGrid, cr, false);
  return r;
}

// Spectral version: F(t) = H_mu(t) from the heat sum, N(S) = N_mu(sqrt S).
inline KaramataReport karamata_check_spectral(const KuznecovSeries &S, const std::vector<HeatValue> &heat,
                                              double beta, double C) {
  detail::require(beta > 0 && C > 0, "karamata_check: requires beta > 0 and C > 0");
  KaramataReport r;
  r.beta = beta;
  r.C = C;
  std::vector<double> lr, cr;
  for (const auto &h : heat) {
    r.tGrid.push_back(h.t);
    r.laplace.push_back(h.H);
    lr.push_back(h.H * std::pow(h.t, beta) / C);
  }
  const double c = C / gamma_fn(beta + 1.0);
  for (std::size_t i = 0; i < S.grid.size(); ++i) {
    const double s2 = S.grid[i] * S.grid[i];
    r.SGrid.push_back(s2);
    r.counting.push_back(S.values[i]);
    cr.push_back(S.values[i] * std::pow(s2, -beta) / c);
  }
  r.laplaceDeviation = detail::final_decade_deviation(r.tGrid, lr, true);
  r.countingDeviation = detail::final_decade_deviation(r.SGrid, cr, false);
  return r;
}

// ---------------------------------------------------------------------------
// Heat sum against the Gaussian average.

struct HeatGaussianRow {
  double t = 0.0;
  double heatScaled = 0.0;  // H (4 pi t)^{n/2}
  double G = 0.0;
  double gap = 0.0;         // relative
  double imageBound = 0.0;  // relative bound on the non-nearest images
};

struct HeatGaussianReport {
  std::vector<HeatGaussianRow> rows;
  double maxGap = 0.0;
  bool withinImageBound = true;
};

// mu(M)^2 (prod_i (1 + S_i) - 1): tangential axes see images at distance
// >= 1/2, normal axes at integer distances.
inline double image_bound(const MeasureModel &mu, double t) {
  const int n = mu.ambient_dimension();
  int tangential = n;
  if (const auto *l = std::get_if<SubtorusLebesgue>(&mu.variant())) tangential = l->s;
  if (const auto *f = std::get_if<FourierWeighted>(&mu.variant())) tangential = f->base.s;
  if (const auto *d = std::get_if<DigitSelfSimilar>(&mu.variant()))
    tangential = static_cast<int>(d->axes.size());
  double St = 0.0, Sn = 0.0;
  for (int j = 0; j < 200; ++j) {
    St += 2.0 * std::exp(-(j + 0.5) * (j + 0.5) / (4.0 * t));
    Sn += 2.0 * std::exp(-(j + 1.0) * (j + 1.0) / (4.0 * t));
  }
  const double m = total_mass(mu);
  return m * m * (std::pow(1.0 + St, tangential) * std::pow(1.0 + Sn, n - tangential) - 1.0);
}

inline HeatGaussianReport heat_vs_gaussian_check(const MeasureModel &mu, const DistanceProfile &F,
                                                 const std::vector<double> &tGrid, double eps = 1e-13,
                                                 double budgetPoints = kDefaultLatticeBudget) {
  const auto heat = heat_sum(mu, tGrid, eps, budgetPoints);
  const int n = mu.ambient_dimension();
  HeatGaussianReport r;
  for (const auto &h : heat) {
    HeatGaussianRow row;
    row.t = h.t;
    row.heatScaled = h.H * std::pow(4.0 * std::numbers::pi * h.t, 0.5 * n);
    row.G = gaussian_average(F, h.t);
    row.gap = std::abs(row.heatScaled - row.G) / row.heatScaled;
    row.imageBound = image_bound(mu, h.t) / row.heatScaled;
    r.maxGap = std::max(r.maxGap, row.gap);
    r.withinImageBound = r.withinImageBound && row.gap <= row.imageBound + 1e-9;
    r.rows.push_back(row);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Remainder exponent.

struct RemainderReport {
  double slope = 0.0;       // log-log slope of the windowed max |residual|
  double halfWidth = 0.0;
  double leadingExponent = 0.0;  // n - s
  double delta = 0.0;
  bool consistent = false;  // slope <= n - s - delta + tolerance
  double tolerance = 0.15;
  std::vector<double> binCentres, binMax;
};

// The slope is fitted over bins in the final `fitDecades` decades.
inline RemainderReport abelian_remainder_check(const KuznecovSeries &S, double A, double delta,
                                               double fitDecades = 2.0, double binsPerDecade = 4.0) {
  detail::require(A > 0, "abelian_remainder_check: A must be positive");
  const double lo = S.grid.front() > 0 ? S.grid.front() : S.grid[1];
  const double hi = S.grid.back();
  detail::require(hi / lo >= 1e3 * (1 - 1e-9), "abelian_remainder_check: series must span 3 decades");
  const double e = S.n - S.s;
  const double scale = constant_bundle(S.n, S.s).Cns * A;
  RemainderReport r;
  r.leadingExponent = e;
  r.delta = delta;
  // Bins of equal log-width aligned to the top of the grid; the partial
  // bottom bin is dropped.
  const double width = std::log(10.0) / binsPerDecade;
  const auto bins = static_cast<std::size_t>(std::floor(std::log(hi / lo) / width + 1e-9));
  detail::require(bins >= 3, "abelian_remainder_check: too few bins");
  std::vector<double> mx(bins, 0.0);
  for (std::size_t i = 0; i < S.grid.size(); ++i) {
    if (S.grid[i] <= 0) continue;
    const double pos = std::log(hi / S.grid[i]) / width;
    if (pos >= static_cast<double>(bins)) continue;
    const auto b = std::min(bins - 1, static_cast<std::size_t>(pos));
    mx[b] = std::max(mx[b], std::abs(S.values[i] - scale * std::pow(S.grid[i], e)));
  }
  for (std::size_t b = bins; b-- > 0;)
    if (mx[b] > 0) {
      r.binCentres.push_back(hi * std::exp(-(b + 0.5) * width));
      r.binMax.push_back(mx[b]);
    }
  const auto f = fit_loglog(r.binCentres, r.binMax, hi * std::pow(10.0, -fitDecades), INFINITY);
  r.slope = f.slope;
  r.halfWidth = f.halfWidth;
  r.consistent = r.slope <= e - delta + r.tolerance;
  return r;
}

}  // namespace kuzlab

#endif  // KUZLAB_ASYMPTOTICS_HPP_
