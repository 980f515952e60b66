#ifndef KUZLAB_SPECTRAL_HPP_
#define KUZLAB_SPECTRAL_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kuzlab/error.hpp"
#include "kuzlab/io.hpp"
#include "kuzlab/measures.hpp"
#include "kuzlab/parallel.hpp"
#include "kuzlab/quadrature.hpp"
#include "kuzlab/specfun.hpp"

namespace kuzlab {

constexpr double kDefaultLatticeBudget = 1e8;

namespace detail {
// Relative slack in |k|^2 <= R^2 comparisons so that eigenvalues sitting
// exactly on a grid value are counted.
constexpr double kRadiusSlack = 1e-12;

inline double lattice_radius_squared(double lambda) {
  const double R = lambda / (2.0 * std::numbers::pi);
  return R * R * (1.0 + kRadiusSlack);
}

inline double lattice_count_estimate(int n, double lambda) {
  const double R = lambda / (2.0 * std::numbers::pi) + 0.5 * std::sqrt(static_cast<double>(n));
  return ball_volume(n) * std::pow(R, n);
}

inline void check_budget(int n, double lambda, double budget) {
  const double est = lattice_count_estimate(n, lambda);
  if (est > budget)
    throw BudgetError("lattice ball at lambda = " + format_double(lambda) + " holds about " +
                      format_double(std::round(est)) + " points, above the budget of " +
                      format_double(budget));
}
}  // namespace detail

// Frequencies k in Z^n with 2 pi |k| <= lambdaMax.
struct LatticeBall {
  int n = 2;
  double lambdaMax = 0.0;

  std::int64_t radius_bound() const {
    return static_cast<std::int64_t>(std::floor(std::sqrt(detail::lattice_radius_squared(lambdaMax))));
  }

  template <typename Visit>
  void for_each(Visit &&visit) const {
    const double R2 = detail::lattice_radius_squared(lambdaMax);
    const std::int64_t K = radius_bound();
    LatticeVector k(n, 0);
    auto rec = [&](auto &self, int d, double used) -> void {
      if (d == n) {
        visit(static_cast<const LatticeVector &>(k), used);
        return;
      }
      const auto m = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(0.0, R2 - used))));
      for (std::int64_t v = -std::min(m, K); v <= std::min(m, K); ++v) {
        k[d] = v;
        self(self, d + 1, used + static_cast<double>(v * v));
      }
    };
    rec(rec, 0, 0.0);
  }

  std::size_t count() const {
    std::size_t c = 0;
    for_each([&](const LatticeVector &, double) { ++c; });
    return c;
  }
};

// Evaluates mu^(k) on a box |k_i| <= K from per-axis tables. Every
// implemented measure is a sum of terms that factor across axes, except the
// tangential part of Fourier-weighted measures, which is sparse.
class CoefficientEvaluator {
 public:
  CoefficientEvaluator(const MeasureModel &mu, std::int64_t K) : n_(mu.ambient_dimension()), K_(K) {
    add(mu);
  }

  int dimension() const { return n_; }
  std::size_t term_count() const { return terms_.size(); }

  // Per-axis factor of term t at coordinate value v.
  const std::complex<double> &factor(std::size_t t, int axis, std::int64_t v) const {
    return terms_[t].axes[axis][static_cast<std::size_t>(v + K_)];
  }

  // Sparse tangential weight of term t at k (1 for product terms).
  double sparse_weight(std::size_t t, const std::int64_t *k) const {
    const Term &term = terms_[t];
    if (term.sparse.empty()) return 1.0;
    for (const auto &[kk, w] : term.sparse) {
      bool match = true;
      for (std::size_t i = 0; i < kk.size() && match; ++i) match = kk[i] == k[i];
      if (match) return w;
    }
    return 0.0;
  }

  bool is_sparse(std::size_t t) const { return !terms_[t].sparse.empty(); }
  int sparse_axes(std::size_t t) const { return terms_[t].sparseAxes; }

  std::complex<double> operator()(const LatticeVector &k) const {
    detail::require(static_cast<int>(k.size()) == n_, "CoefficientEvaluator: wrong dimension");
    std::complex<double> total{0.0, 0.0};
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      std::complex<double> c{sparse_weight(t, k.data()), 0.0};
      for (int i = 0; i < n_; ++i) {
        if (std::abs(k[i]) > K_) throw DomainError("CoefficientEvaluator: k outside table");
        c *= factor(t, i, k[i]);
      }
      total += c;
    }
    return total;
  }

 private:
  struct Term {
    std::vector<std::vector<std::complex<double>>> axes;  // index v + K
    std::vector<std::pair<LatticeVector, double>> sparse;  // tangential support
    int sparseAxes = 0;
  };

  std::vector<std::complex<double>> table(auto &&f) const {
    std::vector<std::complex<double>> t(static_cast<std::size_t>(2 * K_ + 1));
    for (std::int64_t v = -K_; v <= K_; ++v) t[static_cast<std::size_t>(v + K_)] = f(v);
    return t;
  }

  std::vector<std::complex<double>> delta_table() const {
    return table([](std::int64_t v) { return std::complex<double>(v == 0 ? 1.0 : 0.0, 0.0); });
  }

  std::vector<std::complex<double>> ones_table() const {
    return table([](std::int64_t) { return std::complex<double>(1.0, 0.0); });
  }

  std::vector<std::complex<double>> phase_table(double offset) const {
    return table([offset](std::int64_t v) {
      const double ph = -2.0 * std::numbers::pi * static_cast<double>(v) * offset;
      return std::complex<double>(std::cos(ph), std::sin(ph));
    });
  }

  void add(const MeasureModel &mu) {
    std::visit(
        [&](const auto &m) {
          using T = std::decay_t<decltype(m)>;
          Term term;
          if constexpr (std::is_same_v<T, SubtorusLebesgue>) {
            for (int i = 0; i < m.s; ++i) term.axes.push_back(delta_table());
            for (double o : m.normal_offset) term.axes.push_back(phase_table(o));
          } else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
            for (const auto &ax : m.axes) {
              if (const auto *d = std::get_if<DigitAxis>(&ax))
                term.axes.push_back(table([d](std::int64_t v) {
                  return digit_axis_coefficient(*d, static_cast<double>(v));
                }));
              else
                term.axes.push_back(delta_table());
            }
            for (double o : m.normal_offset) term.axes.push_back(phase_table(o));
          } else if constexpr (std::is_same_v<T, FourierWeighted>) {
            for (int i = 0; i < m.base.s; ++i) term.axes.push_back(ones_table());
            for (double o : m.base.normal_offset) term.axes.push_back(phase_table(o));
            term.sparseAxes = m.base.s;
            term.sparse.emplace_back(LatticeVector(m.base.s, 0), 1.0);
            for (const auto &md : m.modes) {
              LatticeVector neg(md.k.size());
              for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -md.k[i];
              term.sparse.emplace_back(md.k, 0.5 * md.amplitude);
              term.sparse.emplace_back(neg, 0.5 * md.amplitude);
            }
          } else {
            for (const auto &c : m.components) add(c);
            return;
          }
          terms_.push_back(std::move(term));
        },
        mu.variant());
  }

  int n_;
  std::int64_t K_;
  std::vector<Term> terms_;
};

namespace detail {

// One pass over the lattice ball of radius^2 R2, chunked by the first
// coordinate. visit(acc, norm2, |mu^(k)|^2) is called for every point whose
// coefficient may be nonzero; subtrees whose product factors vanish are
// skipped. Returns the per-chunk accumulators in chunk order.
template <typename Acc, typename Visit>
std::vector<Acc> lattice_map(const CoefficientEvaluator &ev, double R2, const Acc &init,
                             Visit &&visit) {
  const int n = ev.dimension();
  const auto K = static_cast<std::int64_t>(std::floor(std::sqrt(R2)));
  const std::size_t nt = ev.term_count();
  return map_chunks<Acc>(static_cast<std::size_t>(2 * K + 1), [&](std::size_t chunk) {
    Acc acc = init;
    const std::int64_t k0 = static_cast<std::int64_t>(chunk) - K;
    std::vector<std::int64_t> k(n, 0);
    // partial[d][t]: product of factors of term t over axes < d.
    std::vector<std::vector<std::complex<double>>> partial(n + 1,
                                                           std::vector<std::complex<double>>(nt));
    auto rec = [&](auto &self, int d, double used) -> void {
      if (d == n) {
        std::complex<double> c{0.0, 0.0};
        for (std::size_t t = 0; t < nt; ++t) {
          if (ev.is_sparse(t)) {
            const double w = ev.sparse_weight(t, k.data());
            if (w == 0.0) continue;
            c += w * partial[n][t];
          } else {
            c += partial[n][t];
          }
        }
        visit(acc, used, std::norm(c));
        return;
      }
      const auto m = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(0.0, R2 - used))));
      const std::int64_t lo = d == 0 ? k0 : -m, hi = d == 0 ? k0 : m;
      for (std::int64_t v = lo; v <= hi; ++v) {
        k[d] = v;
        bool any = false;
        for (std::size_t t = 0; t < nt; ++t) {
          partial[d + 1][t] = (d == 0 ? std::complex<double>(1.0, 0.0) : partial[d][t]) *
                              ev.factor(t, d, v);
          // Sparse tangential prefixes must match some support vector.
          any = any || partial[d + 1][t] != 0.0;
        }
        if (!any) continue;
        self(self, d + 1, used + static_cast<double>(v) * static_cast<double>(v));
      }
    };
    rec(rec, 0, 0.0);
    return acc;
  });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kuznecov sums.

struct KuznecovSeries {
  std::string measure;
  int n = 0;
  double s = 0.0;
  std::optional<double> A;
  std::vector<double> grid;
  std::vector<double> values;
  // Window averages (1/(2 h lambda)) int_{lambda(1-h)}^{lambda(1+h)} N.
  double smoothingHalfWidth = 0.1;
  std::vector<double> smoothed;
};

struct SweepOptions {
  double budgetPoints = kDefaultLatticeBudget;
  double smoothingHalfWidth = 0.1;
};

inline KuznecovSeries kuznecov_sweep(const MeasureModel &mu, const std::vector<double> &grid,
                                     const SweepOptions &opt = {}) {
  detail::require(!grid.empty(), "kuznecov_sweep: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    detail::require(grid[i] >= 0 && std::isfinite(grid[i]), "kuznecov_sweep: lambda must be >= 0");
    if (i) detail::require(grid[i] > grid[i - 1], "kuznecov_sweep: grid must be increasing");
  }
  const double h = opt.smoothingHalfWidth;
  detail::require(h > 0 && h < 1, "kuznecov_sweep: smoothing half-width must lie in (0, 1)");
  const int n = mu.ambient_dimension();
  const double lmax = grid.back() * (1.0 + h);
  detail::check_budget(n, lmax, opt.budgetPoints);

  // Cutoffs: every grid value and the two window ends.
  std::vector<double> cut;
  for (double l : grid) {
    cut.push_back(l);
    cut.push_back(l * (1.0 - h));
    cut.push_back(l * (1.0 + h));
  }
  std::sort(cut.begin(), cut.end());
  cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
  std::vector<double> cut2(cut.size());
  for (std::size_t i = 0; i < cut.size(); ++i) cut2[i] = detail::lattice_radius_squared(cut[i]);

  const double R2 = cut2.back();
  CoefficientEvaluator ev(mu, static_cast<std::int64_t>(std::floor(std::sqrt(R2))));
  struct Bins {
    std::vector<double> c0, c1;
  };
  Bins init{std::vector<double>(cut.size(), 0.0), std::vector<double>(cut.size(), 0.0)};
  auto parts = detail::lattice_map(ev, R2, init, [&](Bins &b, double norm2, double c2) {
    const auto j = static_cast<std::size_t>(std::lower_bound(cut2.begin(), cut2.end(), norm2) - cut2.begin());
    if (j >= cut2.size()) return;
    b.c0[j] += c2;
    b.c1[j] += c2 * 2.0 * std::numbers::pi * std::sqrt(norm2);
  });
  std::vector<double> C0(cut.size(), 0.0), C1(cut.size(), 0.0);
  for (const auto &p : parts)
    for (std::size_t j = 0; j < cut.size(); ++j) {
      C0[j] += p.c0[j];
      C1[j] += p.c1[j];
    }
  for (std::size_t j = 1; j < cut.size(); ++j) {
    C0[j] += C0[j - 1];
    C1[j] += C1[j - 1];
  }
  auto index_of = [&](double x) {
    return static_cast<std::size_t>(std::lower_bound(cut.begin(), cut.end(), x) - cut.begin());
  };
  // P(x) = integral of N over [0, x] = x C0(x) - C1(x).
  auto P = [&](double x) {
    const std::size_t j = index_of(x);
    return x * C0[j] - C1[j];
  };

  KuznecovSeries out;
  out.measure = mu.describe();
  out.n = n;
  out.s = mu.growth_dimension();
  out.A = averaged_density_exact(mu);
  out.grid = grid;
  out.smoothingHalfWidth = h;
  for (double l : grid) {
    out.values.push_back(C0[index_of(l)]);
    out.smoothed.push_back(l > 0 ? (P(l * (1.0 + h)) - P(l * (1.0 - h))) / (2.0 * h * l)
                                 : C0[index_of(l)]);
  }
  return out;
}

// N_mu(lambda) = sum over 2 pi |k| <= lambda of |mu^(k)|^2.
inline double kuznecov_sum(const MeasureModel &mu, double lambda,
                           double budgetPoints = kDefaultLatticeBudget) {
  return kuznecov_sweep(mu, {lambda}, {budgetPoints, 0.1}).values.front();
}

// Leading-order prediction C_{n,s} A lambda^{n-s}, when A is known.
inline std::optional<double> kuznecov_prediction(const KuznecovSeries &S, double lambda) {
  if (!S.A || !(S.s > 0 && S.s < S.n)) return std::nullopt;
  return constant_bundle(S.n, S.s).Cns * *S.A * std::pow(lambda, S.n - S.s);
}

inline void write_series_csv(std::ostream &out, const KuznecovSeries &S) {
  CsvWriter w(out, {"lambda", "N", "N_over_pred"});
  for (std::size_t i = 0; i < S.grid.size(); ++i) {
    const auto pred = kuznecov_prediction(S, S.grid[i]);
    w.row({S.grid[i], S.values[i], pred && *pred > 0 ? S.values[i] / *pred : NAN});
  }
}

// ---------------------------------------------------------------------------
// Heat-regularized sums.

struct HeatValue {
  double t = 0.0;
  double H = 0.0;
  double Lambda = 0.0;     // truncation radius in lambda units
  double tailBound = 0.0;  // estimate of the neglected tail
};

namespace detail {

inline double heat_truncation(double t, double mass2, double eps, int n) {
  return std::sqrt(std::max(std::log(mass2 / eps), 1.0) / t) +
         2.0 * std::numbers::pi * std::sqrt(static_cast<double>(n)) / std::sqrt(t);
}

// mass^2 * sum over |k| > R of exp(-4 pi^2 t |k|^2), by comparison with the
// radial Gaussian integral beyond R - sqrt(n)/2.
inline double heat_tail_estimate(double t, double R, double mass2, int n) {
  const double a = 4.0 * std::numbers::pi * std::numbers::pi * t;
  const double r0 = std::max(0.0, R - 0.5 * std::sqrt(static_cast<double>(n)));
  const double area = n * ball_volume(n);
  auto f = [&](double r) { return area * std::pow(r, n - 1) * std::exp(-a * r * r); };
  const double width = 40.0 / std::sqrt(a);
  return mass2 * integrate_composite(f, r0, r0 + width, 400);
}

}  // namespace detail

inline std::vector<HeatValue> heat_sum(const MeasureModel &mu, const std::vector<double> &tGrid,
                                       double eps = 1e-12,
                                       double budgetPoints = kDefaultLatticeBudget) {
  detail::require(!tGrid.empty(), "heat_sum: empty t grid");
  for (double t : tGrid) detail::require(t > 0 && t <= 1, "heat_sum: requires 0 < t <= 1");
  detail::require(eps > 0 && eps <= 1e-6, "heat_sum: requires eps in (0, 1e-6]");
  const int n = mu.ambient_dimension();
  const double mass = total_mass(mu);
  const double mass2 = mass * mass;
  std::vector<double> Lam(tGrid.size()), R2(tGrid.size());
  double lmax = 0.0;
  for (std::size_t i = 0; i < tGrid.size(); ++i) {
    Lam[i] = detail::heat_truncation(tGrid[i], mass2, eps, n);
    R2[i] = detail::lattice_radius_squared(Lam[i]);
    lmax = std::max(lmax, Lam[i]);
  }
  detail::check_budget(n, lmax, budgetPoints);
  const double R2max = detail::lattice_radius_squared(lmax);
  CoefficientEvaluator ev(mu, static_cast<std::int64_t>(std::floor(std::sqrt(R2max))));
  const double fourpi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  auto parts = detail::lattice_map(ev, R2max, std::vector<double>(tGrid.size(), 0.0),
                                   [&](std::vector<double> &acc, double norm2, double c2) {
                                     for (std::size_t i = 0; i < tGrid.size(); ++i)
                                       if (norm2 <= R2[i])
                                         acc[i] += std::exp(-tGrid[i] * fourpi2 * norm2) * c2;
                                   });
  std::vector<HeatValue> out(tGrid.size());
  for (std::size_t i = 0; i < tGrid.size(); ++i) {
    double H = 0.0;
    for (const auto &p : parts) H += p[i];
    const double tail = detail::heat_tail_estimate(tGrid[i], Lam[i] / (2.0 * std::numbers::pi), mass2, n);
    if (tail >= eps * H)
      throw Error("numeric", "heat_sum: truncation tail estimate exceeds eps * H at t = " +
                                 format_double(tGrid[i]));
    out[i] = {tGrid[i], H, Lam[i], tail};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted sums sum (1 + lambda_k^2)^{-(n-u)/2} |mu^(k)|^2.

struct WeightedSum {
  double u = 0.0;
  double partial = 0.0;         // exact partial sum up to Lambda
  double Lambda = 0.0;
  double tailEstimate = 0.0;    // extrapolated from the last two decades
  double value = 0.0;           // partial + tailEstimate
  double decayRatio = 0.0;      // ratio of the last two decade increments
  bool converged = false;
  std::string diagnostic;
  std::vector<double> cutoffs;  // Lambda / 10^j
  std::vector<double> partials;
};

inline WeightedSum hr_weighted_sum(const MeasureModel &mu, double u, double Lambda = 2000.0,
                                   double budgetPoints = kDefaultLatticeBudget) {
  const int n = mu.ambient_dimension();
  detail::require(u > 0 && u < n, "hr_weighted_sum: requires 0 < u < n");
  detail::require(Lambda >= 100.0, "hr_weighted_sum: Lambda must be >= 100");
  detail::check_budget(n, Lambda, budgetPoints);
  WeightedSum W;
  W.u = u;
  W.Lambda = Lambda;
  for (double c = Lambda; c >= 1.0; c /= 10.0) W.cutoffs.insert(W.cutoffs.begin(), c);
  std::vector<double> cut2;
  for (double c : W.cutoffs) cut2.push_back(detail::lattice_radius_squared(c));
  const double expo = -0.5 * (n - u);
  const double fourpi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  CoefficientEvaluator ev(mu, static_cast<std::int64_t>(std::floor(std::sqrt(cut2.back()))));
  auto parts = detail::lattice_map(ev, cut2.back(), std::vector<double>(cut2.size(), 0.0),
                                   [&](std::vector<double> &acc, double norm2, double c2) {
                                     const auto j = static_cast<std::size_t>(
                                         std::lower_bound(cut2.begin(), cut2.end(), norm2) - cut2.begin());
                                     if (j < acc.size()) acc[j] += std::pow(1.0 + fourpi2 * norm2, expo) * c2;
                                   });
  W.partials.assign(cut2.size(), 0.0);
  for (const auto &p : parts)
    for (std::size_t j = 0; j < p.size(); ++j) W.partials[j] += p[j];
  for (std::size_t j = 1; j < W.partials.size(); ++j) W.partials[j] += W.partials[j - 1];
  W.partial = W.partials.back();
  const std::size_t m = W.partials.size();
  const double d1 = W.partials[m - 1] - W.partials[m - 2];
  const double d0 = W.partials[m - 2] - W.partials[m - 3];
  W.decayRatio = d0 > 0 ? d1 / d0 : (d1 == 0 ? 0.0 : INFINITY);
  if (W.decayRatio < 1.0) {
    W.tailEstimate = d1 * W.decayRatio / (1.0 - W.decayRatio);
    W.converged = true;
    W.diagnostic = "decade increments shrink geometrically";
  } else {
    W.tailEstimate = INFINITY;
    W.diagnostic = "partial sums fail the Cauchy criterion: decade increments do not shrink";
  }
  W.value = W.partial + W.tailEstimate;
  return W;
}

struct HrCheckRow {
  double lambda = 0.0;
  double N = 0.0;
  double bound = 0.0;  // (1 + lambda^2)^{(n-u)/2} W
  double slack = 0.0;  // N / bound
  double scaled = 0.0; // N lambda^{-(n-u)}
};

struct HrCheck {
  double u = 0.0;
  double W = 0.0;
  bool holds = true;
  double maxSlack = 0.0;
  double maxScaled = 0.0;
  std::vector<HrCheckRow> rows;
};

// N(lambda) <= (1 + lambda^2)^{(n-u)/2} W at every grid point, with W the
// exact partial weighted sum up to Lambda >= max grid value.
inline HrCheck hr_inequality_check(const MeasureModel &mu, double u, const std::vector<double> &grid,
                                   const WeightedSum &W, double budgetPoints = kDefaultLatticeBudget) {
  detail::require(W.Lambda >= grid.back(), "hr_inequality_check: weighted sum must cover the grid");
  const int n = mu.ambient_dimension();
  const auto S = kuznecov_sweep(mu, grid, {budgetPoints, 0.1});
  HrCheck c;
  c.u = u;
  c.W = W.partial;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    HrCheckRow r;
    r.lambda = grid[i];
    r.N = S.values[i];
    r.bound = std::pow(1.0 + grid[i] * grid[i], 0.5 * (n - u)) * W.partial;
    r.slack = r.N / r.bound;
    r.scaled = grid[i] > 0 ? r.N * std::pow(grid[i], -(n - u)) : 0.0;
    c.holds = c.holds && r.N <= r.bound;
    c.maxSlack = std::max(c.maxSlack, r.slack);
    c.maxScaled = std::max(c.maxScaled, r.scaled);
    c.rows.push_back(r);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Independent check of the complex-lattice reduction: integrate the real
// basis {1, sqrt2 cos(2 pi k.x), sqrt2 sin(2 pi k.x)} (k in a half space)
// against mu with quadrature rules that never use the coefficient formulas.

namespace detail {

struct WeightedPoints {
  std::vector<std::vector<double>> x;
  std::vector<double> w;
};

inline WeightedPoints tensor(const std::vector<WeightedPoints> &axes) {
  WeightedPoints out;
  out.x.push_back({});
  out.w.push_back(1.0);
  for (const auto &ax : axes) {
    WeightedPoints next;
    for (std::size_t i = 0; i < out.w.size(); ++i)
      for (std::size_t j = 0; j < ax.w.size(); ++j) {
        auto p = out.x[i];
        p.push_back(ax.x[j][0]);
        next.x.push_back(std::move(p));
        next.w.push_back(out.w[i] * ax.w[j]);
      }
    out = std::move(next);
  }
  return out;
}

inline WeightedPoints trapezoid_axis(int M) {
  WeightedPoints p;
  for (int i = 0; i < M; ++i) {
    p.x.push_back({static_cast<double>(i) / M});
    p.w.push_back(1.0 / M);
  }
  return p;
}

inline WeightedPoints fixed_axis(double x) {
  return {{{x}}, {1.0}};
}

// Level-L cells of the digit measure, each replaced by the two-point rule
// matching the mean, variance and third central moment of its rescaled copy.
inline WeightedPoints digit_axis_rule(const DigitAxis &a, int level) {
  const double b = a.base;
  const double nd = static_cast<double>(a.digits.size());
  double dm = 0.0;
  for (int d : a.digits) dm += d / nd;
  double dv = 0.0, d3 = 0.0;
  for (int d : a.digits) {
    dv += (d - dm) * (d - dm) / nd;
    d3 += (d - dm) * (d - dm) * (d - dm) / nd;
  }
  const double mean = a.scale * dm / (b - 1.0);
  const double var = a.scale * a.scale * dv / (b * b - 1.0);
  const double mu3 = a.scale * a.scale * a.scale * d3 / (b * b * b - 1.0);
  const double sd = std::sqrt(var);
  const double g = mu3 / (var * sd);
  const double root = std::sqrt(0.25 * g * g + 1.0);
  const double z1 = 0.5 * g - root, z2 = 0.5 * g + root;
  const double p1 = z2 / (z2 - z1), p2 = -z1 / (z2 - z1);
  const double cell = std::pow(b, -level);
  std::vector<double> starts{0.0};
  for (int j = 1; j <= level; ++j) {
    std::vector<double> next;
    const double w = a.scale * std::pow(b, -j);
    for (double s0 : starts)
      for (int d : a.digits) next.push_back(s0 + d * w);
    starts = std::move(next);
  }
  WeightedPoints p;
  const double wcell = 1.0 / static_cast<double>(starts.size());
  for (double s0 : starts) {
    p.x.push_back({s0 + cell * (mean + z1 * sd)});
    p.w.push_back(wcell * p1);
    p.x.push_back({s0 + cell * (mean + z2 * sd)});
    p.w.push_back(wcell * p2);
  }
  return p;
}

inline void append_rule(const MeasureModel &mu, WeightedPoints &out) {
  constexpr int kTrapezoid = 256;
  std::visit(
      [&](const auto &m) {
        using T = std::decay_t<decltype(m)>;
        std::vector<WeightedPoints> axes;
        if constexpr (std::is_same_v<T, SubtorusLebesgue>) {
          for (int i = 0; i < m.s; ++i) axes.push_back(trapezoid_axis(kTrapezoid));
          for (double o : m.normal_offset) axes.push_back(fixed_axis(o));
        } else if constexpr (std::is_same_v<T, DigitSelfSimilar>) {
          for (const auto &ax : m.axes) {
            if (const auto *d = std::get_if<DigitAxis>(&ax))
              axes.push_back(digit_axis_rule(*d, 12));
            else
              axes.push_back(trapezoid_axis(kTrapezoid));
          }
          for (double o : m.normal_offset) axes.push_back(fixed_axis(o));
        } else if constexpr (std::is_same_v<T, FourierWeighted>) {
          for (int i = 0; i < m.base.s; ++i) axes.push_back(trapezoid_axis(kTrapezoid));
          for (double o : m.base.normal_offset) axes.push_back(fixed_axis(o));
        } else {
          for (const auto &c : m.components) append_rule(c, out);
          return;
        }
        auto rule = tensor(axes);
        if constexpr (std::is_same_v<T, FourierWeighted>) {
          for (std::size_t i = 0; i < rule.w.size(); ++i) {
            double w = 1.0;
            for (const auto &md : m.modes) {
              double ph = 0.0;
              for (int a = 0; a < m.base.s; ++a) ph += static_cast<double>(md.k[a]) * rule.x[i][a];
              w += md.amplitude * std::cos(2.0 * std::numbers::pi * ph);
            }
            rule.w[i] *= w;
          }
        }
        out.x.insert(out.x.end(), rule.x.begin(), rule.x.end());
        out.w.insert(out.w.end(), rule.w.begin(), rule.w.end());
      },
      mu.variant());
}

}  // namespace detail

inline double real_basis_oracle(const MeasureModel &mu, double lambda) {
  const int n = mu.ambient_dimension();
  if (n > 2 || lambda > 50.0) throw BudgetError("real_basis_oracle: requires n <= 2 and lambda <= 50");
  detail::require(lambda >= 0, "real_basis_oracle: lambda must be >= 0");
  detail::WeightedPoints rule;
  detail::append_rule(mu, rule);
  double mass = 0.0;
  for (double w : rule.w) mass += w;
  double total = mass * mass;
  LatticeBall ball{n, lambda};
  ball.for_each([&](const LatticeVector &k, double) {
    // Half-space representative: first nonzero coordinate positive.
    int first = 0;
    while (first < n && k[first] == 0) ++first;
    if (first == n || k[first] < 0) return;
    double ic = 0.0, is = 0.0;
    for (std::size_t i = 0; i < rule.w.size(); ++i) {
      double ph = 0.0;
      for (int a = 0; a < n; ++a) ph += static_cast<double>(k[a]) * rule.x[i][a];
      ph *= 2.0 * std::numbers::pi;
      ic += rule.w[i] * std::numbers::sqrt2 * std::cos(ph);
      is += rule.w[i] * std::numbers::sqrt2 * std::sin(ph);
    }
    total += ic * ic + is * is;
  });
  return total;
}

}  // namespace kuzlab

#endif  // KUZLAB_SPECTRAL_HPP_
