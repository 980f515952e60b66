#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "kuzlab/spectral.hpp"

using namespace kuzlab;
constexpr double kPi = std::numbers::pi;

namespace {

double circle_count(double lambda) { return 2.0 * std::floor(lambda / (2.0 * kPi)) + 1.0; }

// Direct sum over the lattice ball of prod_j cos^2(2 pi k1 c 3^{-j}), the
// squared modulus of the middle-thirds coefficient at scale c.
double cantor_direct_sum(double c, double lambda) {
  const double R = lambda / (2.0 * kPi);
  const auto K = static_cast<int>(std::floor(R));
  double total = 0.0;
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      if (static_cast<double>(a * a + b * b) > R * R) continue;
      double p = 1.0;
      for (int j = 1; j <= 60; ++j) {
        const double v = std::cos(2.0 * kPi * a * c * std::pow(3.0, -j));
        p *= v * v;
      }
      total += p;
    }
  return total;
}

MeasureModel fourier_single(double a = 0.2, std::int64_t k = 5) {
  return FourierWeighted{SubtorusLebesgue{2, 1, {0.5}}, {{{k}, a}}};
}

}  // namespace

TEST(Kuznecov, CircleExactCounts) {
  EXPECT_EQ(kuznecov_sum(make_circle(), 100.0), 31.0);
  EXPECT_EQ(kuznecov_sum(make_circle(), 0.0), 1.0);
  const auto S = kuznecov_sweep(make_circle(), {10.0, 100.0, 1000.0});
  EXPECT_EQ(S.values, (std::vector<double>{3.0, 31.0, 319.0}));
  for (double l = 1.0; l < 3000; l *= 1.173) EXPECT_EQ(kuznecov_sum(make_circle(), l), circle_count(l)) << l;
}

TEST(Kuznecov, EigenvalueOnTheGridIsCounted) {
  EXPECT_EQ(kuznecov_sum(make_circle(), 2.0 * kPi), 3.0);
  EXPECT_EQ(kuznecov_sum(make_circle(), 2.0 * kPi * (1 - 1e-9)), 1.0);
}

TEST(Kuznecov, CantorAgainstDirectSummation) {
  for (double c : {1.0, 0.5})
    for (double l : {20.0, 50.0}) {
      const double direct = cantor_direct_sum(c, l);
      EXPECT_NEAR(kuznecov_sum(make_cantor_circle(c), l) / direct, 1.0, 1e-9) << c << " " << l;
    }
}

TEST(Kuznecov, FourierModeJump) {
  // Crossing 2 pi |k1| = 10 pi adds (0, +-5) with weight 1 and (+-5, 0) with
  // weight (a/2)^2 each.
  const auto mu = fourier_single(0.2, 5);
  const double l0 = 10.0 * kPi;
  const double jump = kuznecov_sum(mu, l0 * (1 + 1e-9)) - kuznecov_sum(mu, l0 * (1 - 1e-9));
  EXPECT_NEAR(jump, 2.0 + 2.0 * 0.01, 1e-12);
}

TEST(Kuznecov, MixtureMassSquaredAtZero) {
  const MeasureModel mix = Mixture{{make_circle(2, 0.2), make_circle(2, 0.7)}};
  EXPECT_NEAR(kuznecov_sum(mix, 0.0), 4.0, 1e-15);
}

TEST(Kuznecov, SweepIsMonotone) {
  for (const auto &mu : {make_circle(), make_cantor_circle(1.0), fourier_single()}) {
    const auto S = kuznecov_sweep(mu, log_grid(1.0, 500.0, 80));
    for (std::size_t i = 1; i < S.values.size(); ++i) EXPECT_GE(S.values[i], S.values[i - 1]);
    for (std::size_t i = 0; i < S.values.size(); ++i) EXPECT_GT(S.smoothed[i], 0.0);
  }
}

TEST(Kuznecov, SmoothingIsAWindowAverage) {
  // circle: N is a step function with jumps of 2 at 2 pi m.
  const double h = 0.1, l = 200.0;
  const auto S = kuznecov_sweep(make_circle(), {l}, {1e8, h});
  const double a = l * (1 - h), b = l * (1 + h);
  double integral = 0.0;
  const int steps = 200000;
  for (int i = 0; i < steps; ++i) integral += circle_count(a + (b - a) * (i + 0.5) / steps);
  integral *= (b - a) / steps;
  EXPECT_NEAR(S.smoothed[0], integral / (b - a), 1e-3);
}

TEST(Kuznecov, BudgetIsEnforced) {
  EXPECT_THROW(kuznecov_sum(make_circle(), 1e6, 1e6), BudgetError);
  EXPECT_THROW(kuznecov_sweep(make_circle(), {10.0, 5.0}), DomainError);
}

TEST(Kuznecov, CsvHasRatioColumn) {
  std::ostringstream os;
  write_series_csv(os, kuznecov_sweep(make_circle(), {100.0}));
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "lambda,N,N_over_pred");
}

TEST(LatticeReduction, MatchesRealBasisOracle) {
  DigitSelfSimilar product;
  product.n = 2;
  product.axes = {DigitAxis{3, {0, 2}, 0.5}, FullAxis{}};
  std::vector<MeasureModel> models{make_circle(),
                                   make_circle(2, 0.13),
                                   make_cantor_circle(1.0),
                                   make_cantor_circle(0.5),
                                   fourier_single(),
                                   Mixture{{make_circle(2, 0.2), make_cantor_circle(0.5, 2, 0.7)}},
                                   product};
  int cases = 0;
  for (const auto &mu : models)
    for (double l : {7.0, 20.0, 50.0}) {
      const double a = kuznecov_sum(mu, l);
      const double b = real_basis_oracle(mu, l);
      EXPECT_NEAR(a / b, 1.0, 1e-10) << mu.describe() << " " << l;
      ++cases;
    }
  EXPECT_GE(cases, 20);
  EXPECT_NEAR(real_basis_oracle(make_circle(), 20.0), 7.0, 1e-12);
  EXPECT_THROW(real_basis_oracle(make_circle(), 60.0), BudgetError);
}

TEST(Weyl, LatticeCountDensity) {
  const LatticeBall ball{2, 1000.0};
  const double R = 1000.0 / (2 * kPi);
  EXPECT_NEAR(static_cast<double>(ball.count()) / (kPi * R * R), 1.0, 0.01);
}

TEST(Heat, CircleThetaSum) {
  const auto H = heat_sum(make_circle(), {1e-3, 1e-2, 0.1});
  for (const auto &h : H) {
    double theta = 0.0;
    for (int k = -400; k <= 400; ++k) theta += std::exp(-4 * kPi * kPi * k * k * h.t);
    EXPECT_NEAR(h.H / theta, 1.0, 1e-12) << h.t;
    EXPECT_LT(h.tailBound, 1e-12 * h.H);
  }
  EXPECT_NEAR(H[0].H / (1.0 / (2 * std::sqrt(kPi * 1e-3))), 1.0, 1e-3);
  EXPECT_NEAR(H[0].H, 8.9206, 1e-3);
}

TEST(Heat, LargeTimeLeavesTheZeroMode) {
  const auto H = heat_sum(make_cantor_circle(), {1.0});
  EXPECT_NEAR(H[0].H, 1.0, 1e-15 + 2 * std::exp(-4 * kPi * kPi));
}

TEST(Heat, StrictlyDecreasing) {
  const auto tg = log_grid(1e-4, 1.0, 30);
  for (const auto &mu : {make_circle(), make_cantor_circle(), fourier_single()}) {
    const auto H = heat_sum(mu, tg);
    for (std::size_t i = 1; i < H.size(); ++i) EXPECT_LT(H[i].H, H[i - 1].H);
  }
}

TEST(Heat, StieltjesSumOfTheCountingFunction) {
  for (const auto &mu : {make_circle(), make_cantor_circle(0.5), fourier_single()}) {
    // every eigenvalue 2 pi sqrt(m) below 2 pi * 20
    std::vector<double> grid{0.0};
    for (int m = 1; m <= 400; ++m) grid.push_back(2 * kPi * std::sqrt(m));
    const auto S = kuznecov_sweep(mu, grid);
    for (double t : {0.01, 0.05}) {
      double H = S.values[0];
      for (std::size_t i = 1; i < grid.size(); ++i)
        H += std::exp(-t * grid[i] * grid[i]) * (S.values[i] - S.values[i - 1]);
      EXPECT_NEAR(heat_sum(mu, {t})[0].H / H, 1.0, 1e-9) << mu.describe() << " " << t;
    }
  }
}

TEST(Heat, RejectsBadInput) {
  EXPECT_THROW(heat_sum(make_circle(), {0.0}), DomainError);
  EXPECT_THROW(heat_sum(make_circle(), {1e-3}, 0.1), DomainError);
  EXPECT_THROW(heat_sum(make_circle(), {1e-9}), BudgetError);
}

TEST(WeightedSum, CircleConvergesAcrossCutoffs) {
  const auto a = hr_weighted_sum(make_circle(), 0.5, 1000.0);
  const auto b = hr_weighted_sum(make_circle(), 0.5, 10000.0);
  EXPECT_TRUE(a.converged);
  EXPECT_TRUE(b.converged);
  EXPECT_NEAR(a.partial / b.partial, 1.0, 0.02);
  // sum over the line: 1 + 2 sum_k (1 + 4 pi^2 k^2)^{-3/4}
  double direct = 1.0;
  for (int k = 1; k <= 1591; ++k) direct += 2.0 * std::pow(1 + 4 * kPi * kPi * k * k, -0.75);
  EXPECT_NEAR(b.partial / direct, 1.0, 1e-12);
}

TEST(WeightedSum, DivergentWeightGivesDiagnostic) {
  const auto w = hr_weighted_sum(make_circle(), 1.5, 10000.0);
  EXPECT_FALSE(w.converged);
  EXPECT_FALSE(w.diagnostic.empty());
}

TEST(WeightedSum, ZeroModeOnly) {
  const MeasureModel vol = SubtorusLebesgue{2, 2, {}};
  const auto w = hr_weighted_sum(vol, 0.5, 1000.0);
  EXPECT_NEAR(w.value, 1.0, 1e-15);
}

TEST(HrInequality, CircleHoldsEverywhere) {
  const auto grid = log_grid(10.0, 1000.0, 40);
  const auto W = hr_weighted_sum(make_circle(), 0.5, 1000.0);
  const auto c = hr_inequality_check(make_circle(), 0.5, grid, W);
  EXPECT_TRUE(c.holds);
  EXPECT_LE(c.maxSlack, 1.0);
}

TEST(HrInequality, CantorScaledCountBounded) {
  const auto mu = make_cantor_circle(0.5);
  const auto grid = log_grid(10.0, 2000.0, 60);
  const auto W = hr_weighted_sum(mu, 0.5, 2000.0);
  const auto c = hr_inequality_check(mu, 0.5, grid, W);
  EXPECT_TRUE(c.holds);
  EXPECT_LE(c.maxScaled, W.partial);
}
