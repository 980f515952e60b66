#ifndef KUZLAB_SHARPNESS_HPP_
#define KUZLAB_SHARPNESS_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kuzlab/asymptotics.hpp"
#include "kuzlab/distdist.hpp"
#include "kuzlab/error.hpp"
#include "kuzlab/measures.hpp"
#include "kuzlab/quadrature.hpp"
#include "kuzlab/spectral.hpp"
#include "kuzlab/specfun.hpp"

namespace kuzlab {

// ---------------------------------------------------------------------------
// Two subtori of different dimensions.

struct MixtureRow {
  double lambda = 0.0;
  double N1 = 0.0, N2 = 0.0, N = 0.0;
  double cross = 0.0;      // |N - N1 - N2|
  double crossBound = 0.0; // 2 sqrt(N1 N2)
  double slackRatio = 0.0; // cross / crossBound (0 when the bound is 0)
};

struct MixtureReport {
  int n = 0, s1 = 0, s2 = 0;
  std::vector<MixtureRow> rows;
  bool crossBoundHolds = true;
  double minSlack = INFINITY;  // min of crossBound - cross
  ExponentFit exponent;
  double fitLo = 0.0, fitHi = 0.0;
  bool exponentMatches = false;
  double exponentTolerance = 0.05;
  double finalComponentRatio = 0.0;  // N2 / N1 at the last grid point
};

struct MixtureSetup {
  int n = 3, s1 = 1, s2 = 2;
  std::vector<double> offset1{0.3, 0.3};
  std::vector<double> offset2{0.7};
};

inline MixtureReport mixture_experiment(const MixtureSetup &cfg, const std::vector<double> &grid,
                                        double fitLo = 0.0, double budgetPoints = kDefaultLatticeBudget) {
  detail::require_config(cfg.s1 >= 0 && cfg.s1 < cfg.s2 && cfg.s2 < cfg.n,
                         "mixture_experiment: requires s1 < s2 < n");
  const MeasureModel mu1 = SubtorusLebesgue{cfg.n, cfg.s1, cfg.offset1};
  const MeasureModel mu2 = SubtorusLebesgue{cfg.n, cfg.s2, cfg.offset2};
  // The subtori meet iff the offsets agree on the axes normal to both.
  bool meet = true;
  const int shift = cfg.s2 - cfg.s1;
  for (std::size_t j = 0; j < cfg.offset2.size(); ++j)
    meet = meet && cfg.offset1[j + shift] == cfg.offset2[j];
  detail::require_config(!meet, "mixture_experiment: subtori intersect (normal offsets coincide)");
  const MeasureModel mu = Mixture{{mu1, mu2}};

  const SweepOptions opt{budgetPoints, 0.1};
  const auto S1 = kuznecov_sweep(mu1, grid, opt);
  const auto S2 = kuznecov_sweep(mu2, grid, opt);
  const auto S = kuznecov_sweep(mu, grid, opt);
  MixtureReport r;
  r.n = cfg.n;
  r.s1 = cfg.s1;
  r.s2 = cfg.s2;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    MixtureRow row;
    row.lambda = grid[i];
    row.N1 = S1.values[i];
    row.N2 = S2.values[i];
    row.N = S.values[i];
    row.cross = std::abs(row.N - row.N1 - row.N2);
    row.crossBound = 2.0 * std::sqrt(row.N1 * row.N2);
    row.slackRatio = row.crossBound > 0 ? row.cross / row.crossBound : 0.0;
    r.crossBoundHolds = r.crossBoundHolds && row.cross <= row.crossBound;
    r.minSlack = std::min(r.minSlack, row.crossBound - row.cross);
    r.rows.push_back(row);
  }
  r.fitHi = grid.back();
  r.fitLo = fitLo > 0 ? fitLo : grid.back() / 10.0;
  r.exponent = fit_exponent_range(S, r.fitLo, r.fitHi);
  r.exponentMatches = std::abs(r.exponent.slope - (cfg.n - cfg.s1)) <= r.exponentTolerance;
  r.finalComponentRatio = r.rows.back().N2 / r.rows.back().N1;
  return r;
}

// ---------------------------------------------------------------------------
// Thresholds of the ball multiplier.

struct Thresholds {
  int s = 1;
  double eps0 = 0.0;  // |m_s - 1| <= 1/100 on [0, eps0]
  double L0 = 0.0;    // |m_s| <= 1/100 on [L0, inf)
  double gridStep = 0.1;
};

inline Thresholds threshold_calibration(int s, double gridStep = 0.1) {
  detail::require(s == 1 || s == 2, "threshold_calibration: requires s in {1, 2}");
  Thresholds th;
  th.s = s;
  th.gridStep = gridStep;
  th.eps0 = bisect_root([s](double tau) { return 1.0 - ball_multiplier(s, tau) - 0.01; }, 1e-3, 2.0);
  // The envelope is decreasing; walk the grid until it drops below 1/100.
  for (long i = 1;; ++i) {
    const double tau = gridStep * static_cast<double>(i);
    if (ball_multiplier_envelope(s, tau) <= 0.01 * (1.0 + 1e-12)) {
      th.L0 = tau;
      break;
    }
    detail::require(tau < 1e6, "threshold_calibration: envelope search did not terminate");
  }
  return th;
}

// ---------------------------------------------------------------------------

// integral of w_s over [a, b].
inline double scale_weight_integral(double s, double a, double b) {
  if (b <= a) return 0.0;
  auto f = [s](double u) { return scale_weight(s, u); };
  std::vector<double> br{a};
  for (double x : {2.0, 5.0, 10.0, 20.0})
    if (x > a && x < b) br.push_back(x);
  br.push_back(b);
  return integrate_with_breaks(f, br, 4000);
}

inline double scale_weight_tail(double s, double a) {
  return scale_weight_integral(s, a, std::max(a, 0.0) + 80.0);
}

// Smallest U >= 2 with tail(U) <= (eta / (8 C0)) body(U), by bisection.
inline double choose_U(double eta, int s, double C0 = 2.0) {
  detail::require(eta > 0 && eta < 1, "choose_U: requires eta in (0, 1)");
  detail::require(C0 >= 1, "choose_U: requires C0 >= 1");
  const double k = eta / (8.0 * C0);
  auto g = [&](double U) { return scale_weight_tail(s, U) - k * scale_weight_integral(s, 1.0, U); };
  if (g(2.0) <= 0) return 2.0;
  double hi = 4.0;
  while (g(hi) > 0) {
    hi *= 2.0;
    detail::require(hi < 1e3, "choose_U: no admissible U below 1000");
  }
  double lo = hi / 2.0 < 2.0 ? 2.0 : hi / 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Frequency construction.

enum class ConstructionMode { kFull, kGSide };

struct ConstructionRecord {
  int s = 1;
  ConstructionMode mode = ConstructionMode::kGSide;
  std::vector<double> amplitudes;
  std::vector<LatticeVector> frequencies;
  std::vector<double> eta, U, r;
  double eps0 = 0.0, L0 = 0.0, C0 = 2.0;
  std::optional<double> delta;
  // Upper bound on U_m r_m: 1/10 in full mode, 1/2 in G-side mode.
  double blockLimit = 0.1;

  double frequency_norm(std::size_t m) const { return std::sqrt(lattice_norm_squared(frequencies[m])); }
  double averaged_density() const {
    double q = 0.0;
    for (double a : amplitudes) q += a * a;
    return 1.0 + 0.5 * q;
  }
};

struct ConstructionOptions {
  ConstructionMode mode = ConstructionMode::kGSide;
  std::optional<double> delta;
  std::vector<std::int64_t> frequencies;  // explicit |k_m| (G-side mode)
  double integerBudget = 9.0e18;
  double C0 = 2.0;
};

inline std::vector<std::string> validate_record(const ConstructionRecord &rec) {
  std::vector<std::string> v;
  double sum = 0.0;
  for (double a : rec.amplitudes) sum += a;
  if (sum > 0.25 + 1e-15) v.push_back("sum of amplitudes exceeds 1/4");
  for (std::size_t m = 0; m < rec.amplitudes.size(); ++m) {
    const double k = rec.frequency_norm(m);
    if (m > 0 && !(k > rec.frequency_norm(m - 1))) v.push_back("frequency norms must strictly increase");
    if (m > 0 &&
        2.0 * std::numbers::pi * rec.frequency_norm(m - 1) * rec.U[m] * rec.r[m] > rec.eps0 * (1 + 1e-12))
      v.push_back("block " + std::to_string(m + 1) + ": previous frequency not below eps0 on the block");
    if (rec.U[m] * rec.r[m] > rec.blockLimit * (1 + 1e-12))
      v.push_back("block " + std::to_string(m + 1) + ": U r exceeds " + format_double(rec.blockLimit));
    if (rec.delta && std::pow(rec.r[m], *rec.delta) > rec.eta[m] / (10.0 * (m + 1)) * (1 + 1e-12))
      v.push_back("block " + std::to_string(m + 1) + ": r^delta exceeds eta / (10 m)");
  }
  return v;
}

inline ConstructionRecord build_construction(int s, std::vector<double> amplitudes,
                                             const ConstructionOptions &opt, std::size_t M = 0) {
  detail::require(s == 1 || s == 2, "build_construction: requires s in {1, 2}");
  if (M > 0) {
    detail::require_config(M <= amplitudes.size(), "build_construction: fewer amplitudes than M");
    amplitudes.resize(M);
  }
  detail::require_config(!amplitudes.empty(), "build_construction: need at least one amplitude");
  double sum = 0.0;
  for (double a : amplitudes) {
    detail::require_config(a > 0, "build_construction: amplitudes must be positive");
    sum += a;
  }
  detail::require_config(sum <= 0.25 + 1e-15, "build_construction: sum of amplitudes must be <= 1/4");
  const bool full = opt.mode == ConstructionMode::kFull;
  if (full)
    detail::require_config(opt.delta && *opt.delta > 0 && *opt.delta < 1,
                           "build_construction: full mode needs delta in (0, 1)");
  if (!opt.frequencies.empty())
    detail::require_config(opt.frequencies.size() == amplitudes.size(),
                           "build_construction: one explicit frequency per amplitude");

  const Thresholds th = threshold_calibration(s);
  ConstructionRecord rec;
  rec.s = s;
  rec.mode = opt.mode;
  rec.amplitudes = amplitudes;
  rec.eps0 = th.eps0;
  rec.L0 = th.L0;
  rec.C0 = opt.C0;
  rec.delta = full ? opt.delta : std::nullopt;
  rec.blockLimit = full ? 0.1 : 0.5;
  const double twopi = 2.0 * std::numbers::pi;
  double prev = 0.0;
  for (std::size_t m = 0; m < amplitudes.size(); ++m) {
    const double eta = amplitudes[m] * amplitudes[m] / 100.0;
    const double U = choose_U(eta, s, opt.C0);
    double k;
    if (!opt.frequencies.empty()) {
      k = static_cast<double>(opt.frequencies[m]);
    } else {
      double need = std::max(prev * U * th.L0 / th.eps0, U * th.L0 / (twopi * rec.blockLimit));
      if (full)
        need = std::max(need, th.L0 / twopi * std::pow(10.0 * (m + 1) / eta, 1.0 / *opt.delta));
      k = std::ceil(need * (1.0 - 1e-15));
      if (k <= prev) k = prev + 1.0;
    }
    if (!(k <= opt.integerBudget))
      throw BudgetError("build_construction: |k_" + std::to_string(m + 1) + "| = " + format_double(k) +
                        " exceeds the integer budget " + format_double(opt.integerBudget));
    rec.eta.push_back(eta);
    rec.U.push_back(U);
    rec.r.push_back(th.L0 / (twopi * k));
    LatticeVector kv(s, 0);
    kv[0] = static_cast<std::int64_t>(k);
    rec.frequencies.push_back(kv);
    prev = k;
  }
  const auto bad = validate_record(rec);
  if (!bad.empty()) throw ConfigError("build_construction: " + bad.front());
  return rec;
}

// The Fourier-weighted measure of a record on T^{s+1}.
inline MeasureModel construction_measure(const ConstructionRecord &rec, double offset = 0.5) {
  FourierWeighted fw;
  fw.base = SubtorusLebesgue{rec.s + 1, rec.s, {offset}};
  for (std::size_t m = 0; m < rec.amplitudes.size(); ++m)
    fw.modes.push_back({rec.frequencies[m], rec.amplitudes[m]});
  return fw;
}

// q(rho) = (1 + sum a^2/2 m_s(2 pi |k| rho)) / (1 + sum a^2/2).
inline double q_exact(const ConstructionRecord &rec, double rho) {
  detail::require(rho > 0 && rho <= rec.blockLimit * (1 + 1e-12),
                  "q_exact: rho must lie in (0, " + format_double(rec.blockLimit) + "]");
  double num = 1.0;
  for (std::size_t m = 0; m < rec.amplitudes.size(); ++m)
    num += 0.5 * rec.amplitudes[m] * rec.amplitudes[m] *
           ball_multiplier(rec.s, 2.0 * std::numbers::pi * rec.frequency_norm(m) * rho);
  return num / rec.averaged_density();
}

// ---------------------------------------------------------------------------

struct BlockDeviationReport {
  std::size_t block = 0;  // 1-based
  bool hypothesisHolds = true;
  double qMaxOnBlock = 0.0;
  double qBound = 0.0;            // 1 - eta_m
  double t = 0.0;
  double scaledG = 0.0;           // G(t) / t^{s/2}
  double target = 0.0;            // gamma_s A
  double deviation = 0.0;         // |scaledG - target|
  double blockWeight = 0.0;       // integral of w_s over [1, U]
  double measuredC = 0.0;         // deviation / (A eta blockWeight)
  double measuredCRefined = 0.0;  // same with doubled quadrature panels
  bool stable = false;            // within 20%
  double proofConstant = 0.0;     // vol(B^s) / 2
  bool deviationPositive = false;
};

inline BlockDeviationReport block_deviation_check(const ConstructionRecord &rec, std::size_t m,
                                                  std::size_t panels = 0) {
  detail::require(m >= 1 && m <= rec.amplitudes.size(), "block_deviation_check: no such block");
  const std::size_t i = m - 1;
  BlockDeviationReport r;
  r.block = m;
  r.qBound = 1.0 - rec.eta[i];
  for (double rho : log_grid(rec.r[i], rec.U[i] * rec.r[i], 50)) {
    const double q = q_exact(rec, rho);
    r.qMaxOnBlock = std::max(r.qMaxOnBlock, q);
    r.hypothesisHolds = r.hypothesisHolds && q <= r.qBound;
  }
  const double A = rec.averaged_density();
  const auto F = analytic_profile(construction_measure(rec));
  const auto cb = constant_bundle(rec.s + 1, rec.s);
  r.t = rec.r[i] * rec.r[i];
  const double ts = std::pow(r.t, 0.5 * rec.s);
  if (panels == 0) {
    const double osc = rec.frequency_norm(rec.amplitudes.size() - 1) * rec.r[i] * 40.0;
    panels = std::max<std::size_t>(2000, static_cast<std::size_t>(4.0 * osc));
  }
  r.target = cb.gammaS * A;
  r.blockWeight = scale_weight_integral(rec.s, 1.0, rec.U[i]);
  const double base = A * rec.eta[i] * r.blockWeight;
  r.scaledG = gaussian_average(F, r.t, panels) / ts;
  r.deviation = std::abs(r.scaledG - r.target);
  r.measuredC = r.deviation / base;
  r.measuredCRefined = std::abs(gaussian_average(F, r.t, 2 * panels) / ts - r.target) / base;
  r.stable = std::abs(r.measuredCRefined - r.measuredC) <= 0.2 * r.measuredC;
  r.proofConstant = 0.5 * cb.volBs;
  r.deviationPositive = r.deviation > 0 && r.measuredC > 0;
  return r;
}

// Away from every block (all 2 pi |k_m| rho <= eps0), q stays within
// (1/100) (sum a^2/2) / (1 + sum a^2/2) of 1.
struct QControlReport {
  double maxDeviation = 0.0;
  double bound = 0.0;
  bool holds = true;
};

inline QControlReport q_control_check(const ConstructionRecord &rec, std::size_t points = 50) {
  double kmax = 0.0;
  for (std::size_t m = 0; m < rec.amplitudes.size(); ++m) kmax = std::max(kmax, rec.frequency_norm(m));
  const double rhoMax = rec.eps0 / (2.0 * std::numbers::pi * kmax);
  QControlReport r;
  const double A = rec.averaged_density();
  r.bound = 0.01 * (A - 1.0) / A;
  for (double rho : log_grid(rhoMax * 1e-4, rhoMax, points)) {
    const double d = std::abs(q_exact(rec, rho) - 1.0);
    r.maxDeviation = std::max(r.maxDeviation, d);
    r.holds = r.holds && d <= r.bound * (1 + 1e-12);
  }
  return r;
}

// Monte Carlo F of the construction measure against vol(B^s) A rho^s q(rho).
struct QMonteCarloRow {
  double rho = 0.0;
  double empirical = 0.0;
  double exact = 0.0;
  double stderr_ = 0.0;
  double zscore = 0.0;
};

inline std::vector<QMonteCarloRow> q_montecarlo_check(const ConstructionRecord &rec,
                                                      const std::vector<double> &rhos,
                                                      std::size_t pairs, std::uint64_t seed) {
  const auto E = empirical_profile(construction_measure(rec), pairs, seed);
  const double A = rec.averaged_density();
  std::vector<QMonteCarloRow> out;
  for (double rho : rhos) {
    QMonteCarloRow row;
    row.rho = rho;
    row.empirical = E.F(rho);
    row.exact = ball_volume(rec.s) * A * std::pow(rho, rec.s) * q_exact(rec, rho);
    const double p = row.exact;
    row.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(pairs));
    row.zscore = (row.empirical - row.exact) / row.stderr_;
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic block profiles.

struct SandwichRow {
  double t = 0.0;
  double scaledG = 0.0;
  double lower = 0.0, upper = 0.0;
  double tolerance = 0.0;
  bool holds = true;
};

// kappa_s a_- - tol <= G(t)/t^{s/2} <= kappa_s a_+ + tol with (a_-, a_+) the
// extrema of a over [sqrt(t)/40, 40 sqrt(t)] and tol the weight outside
// u in [1/40, 40] times the supremum of a.
inline SandwichRow gaussian_sandwich(const DistanceProfile &F, double t) {
  SandwichRow row;
  row.t = t;
  const double s = F.sMeta;
  const double st = std::sqrt(t);
  const double kappa = scale_weight_mass(s);
  row.scaledG = gaussian_average(F, t) / std::pow(t, 0.5 * s);
  const auto w = density_window(F, st / 40.0, 40.0 * st, 400);
  const auto wide = density_window(F, st * 1e-6, std::max(40.0 * st, F.diam), 400);
  const double outside = scale_weight_integral(s, 0.0, 1.0 / 40.0) + scale_weight_tail(s, 40.0);
  row.tolerance = 2.0 * outside * wide.aPlus + 1e-9 * kappa * w.aPlus;
  row.lower = kappa * w.aMinus - row.tolerance;
  row.upper = kappa * w.aPlus + row.tolerance;
  row.holds = row.scaledG >= row.lower && row.scaledG <= row.upper;
  return row;
}

struct BlockCentre {
  double r = 0.0;       // block centre radius, t = r^2
  double level = 0.0;   // level of the block
};

struct BlockLimitRow {
  double t = 0.0;
  double scaledG = 0.0;
  double target = 0.0;  // kappa_s level
  double relDeviation = 0.0;
};

struct BlockLimitReport {
  std::vector<BlockLimitRow> rows;
  std::vector<SandwichRow> sandwich;
  bool sandwichHolds = true;
  double globalMin = 0.0, globalMax = 0.0;
};

inline BlockLimitReport block_limit_realization(const DistanceProfile &F,
                                                const std::vector<BlockCentre> &blocks,
                                                const std::vector<double> &tGrid = {}) {
  const auto *syn = std::get_if<SyntheticData>(&F.data);
  detail::require(syn != nullptr, "block_limit_realization: requires a synthetic profile");
  const double s = F.sMeta;
  const double kappa = scale_weight_mass(s);
  BlockLimitReport r;
  r.globalMin = INFINITY;
  r.globalMax = 0.0;
  for (const auto &b : syn->blocks) {
    r.globalMin = std::min(r.globalMin, b.level);
    r.globalMax = std::max(r.globalMax, b.level);
  }
  for (const auto &b : blocks) {
    BlockLimitRow row;
    row.t = b.r * b.r;
    row.scaledG = gaussian_average(F, row.t) / std::pow(row.t, 0.5 * s);
    row.target = kappa * b.level;
    row.relDeviation = std::abs(row.scaledG / row.target - 1.0);
    r.rows.push_back(row);
  }
  std::vector<double> ts = tGrid;
  if (ts.empty())
    for (const auto &b : blocks) ts.push_back(b.r * b.r);
  for (double t : ts) {
    auto row = gaussian_sandwich(F, t);
    r.sandwichHolds = r.sandwichHolds && row.holds;
    r.sandwich.push_back(row);
  }
  return r;
}

// Alternating two-level profile: block m (m = 1..count) has width 10^m in r
// and level `low` for odd m, `high` for even m. Returns the profile and the
// block centres.
inline std::pair<DistanceProfile, std::vector<BlockCentre>> alternating_block_profile(
    double low, double high, double s, int count, double top = 1.0) {
  std::vector<ProfileBlock> blocks;
  std::vector<BlockCentre> centres;
  double upper = top;
  for (int m = 1; m <= count; ++m) {
    const double level = (m % 2 == 1) ? low : high;
    blocks.push_back({upper, level});
    const double lower = upper * std::pow(10.0, -m);
    centres.push_back({std::sqrt(upper * lower), level});
    upper = lower;
  }
  return {synthetic_profile(blocks, s), centres};
}

}  // namespace kuzlab

#endif  // KUZLAB_SHARPNESS_HPP_
