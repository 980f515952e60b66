#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include "kuzlab/sharpness.hpp"

using namespace kuzlab;
constexpr double kPi = std::numbers::pi;

namespace {

// int_a^b w_s = 2^s [Gamma(s/2+1, a^2/4) - Gamma(s/2+1, b^2/4)]
double weight_integral(double s, double a, double b) {
  const double g = 0.5 * s + 1.0;
  const double ub = std::isinf(b) ? 0.0 : boost::math::tgamma(g, b * b / 4);
  return std::pow(2.0, s) * (boost::math::tgamma(g, a * a / 4) - ub);
}

double root(std::function<double(double)> f, double lo, double hi) {
  boost::uintmax_t it = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (r.first + r.second);
}

ConstructionRecord gside_record() {
  ConstructionOptions o;
  o.frequencies = {1000};
  return build_construction(1, {0.25}, o);
}

}  // namespace

TEST(Mixture, LineAndPlaneInThreeTorus) {
  const auto r = mixture_experiment({}, log_grid(6.0, 600.0, 60), 60.0);
  EXPECT_TRUE(r.crossBoundHolds);
  EXPECT_GE(r.minSlack, 0.0);
  for (const auto &row : r.rows) EXPECT_LE(row.slackRatio, 1.0);
  EXPECT_NEAR(r.exponent.slope, 2.0, 0.05);
  EXPECT_TRUE(r.exponentMatches);
  // N2 / N1 ~ lambda^{-1}
  const auto &a = r.rows[r.rows.size() / 2];
  const auto &b = r.rows.back();
  EXPECT_LT(b.N2 / b.N1, a.N2 / a.N1);
  EXPECT_LT(r.finalComponentRatio, 0.01);
}

TEST(Mixture, RejectsIntersectingSubtori) {
  MixtureSetup m;
  m.offset1 = {0.3, 0.7};
  m.offset2 = {0.7};
  EXPECT_THROW(mixture_experiment(m, {10.0, 20.0}), ConfigError);
}

TEST(Thresholds, OneDimension) {
  const auto th = threshold_calibration(1);
  const double e = root([](double t) { return 1.0 - std::sin(t) / t - 0.01; }, 0.01, 1.0);
  EXPECT_NEAR(th.eps0, e, 1e-10);
  EXPECT_NEAR(th.eps0, 0.2453, 1e-4);
  EXPECT_NEAR(th.L0, 100.0, 1e-9);
}

TEST(Thresholds, TwoDimensions) {
  const auto th = threshold_calibration(2);
  const double e = root([](double t) { return 1.0 - 2 * boost::math::cyl_bessel_j(1, t) / t - 0.01; }, 0.01, 1.0);
  EXPECT_NEAR(th.eps0, e, 1e-10);
  for (double tau = th.L0; tau < 50 * th.L0; tau *= 1.001)
    EXPECT_LE(std::abs(2 * boost::math::cyl_bessel_j(1, tau) / tau), 0.01) << tau;
  EXPECT_GT(ball_multiplier_envelope(2, th.L0 - th.gridStep), 0.01);
}

TEST(ScaleWeight, IntegralsAgainstIncompleteGamma) {
  for (double s : {1.0, 2.0})
    for (auto [a, b] : {std::pair{0.0, 1.0}, {1.0, 3.0}, {2.5, 9.0}}) {
      EXPECT_NEAR(scale_weight_integral(s, a, b), weight_integral(s, a, b), 1e-12) << s << a << b;
    }
  EXPECT_NEAR(scale_weight_tail(1.0, 4.0), weight_integral(1.0, 4.0, INFINITY), 1e-13);
}

TEST(ChooseU, DefiningInequalityAndMinimality) {
  for (int s : {1, 2})
    for (double C0 : {1.0, 2.0})
      for (double eta : {6.25e-4, 0.01, 0.5, 0.9}) {
        const double U = choose_U(eta, s, C0);
        const double k = eta / (8 * C0);
        EXPECT_LE(weight_integral(s, U, INFINITY), k * weight_integral(s, 1, U) * (1 + 1e-9));
        if (U > 2.0) {
          const double V = U * (1 - 1e-6);
          EXPECT_GT(weight_integral(s, V, INFINITY), k * weight_integral(s, 1, V));
        }
      }
  EXPECT_NEAR(choose_U(0.5, 1, 1.0), 3.909, 1e-3);  // regression baseline
  EXPECT_NEAR(choose_U(6.25e-4, 1, 2.0), 6.818438, 1e-5);
}

TEST(ChooseU, NonincreasingInEta) {
  double prev = INFINITY;
  for (double eta = 1e-4; eta < 1; eta *= 1.8) {
    const double U = choose_U(eta, 1, 2.0);
    EXPECT_LE(U, prev);
    prev = U;
  }
}

TEST(Construction, FullModeFrequency) {
  ConstructionOptions o;
  o.mode = ConstructionMode::kFull;
  o.delta = 0.5;
  const auto rec = build_construction(1, {0.25}, o);
  EXPECT_NEAR(rec.eta[0], 6.25e-4, 1e-18);
  const double need = 100.0 / (2 * kPi) * std::pow(10.0 / 6.25e-4, 2.0);
  EXPECT_EQ(rec.frequencies[0][0], static_cast<std::int64_t>(std::ceil(need)));
  EXPECT_LE(std::sqrt(rec.r[0]), rec.eta[0] / 10 * (1 + 1e-12));
  EXPECT_TRUE(validate_record(rec).empty());
}

TEST(Construction, GSideRecord) {
  const auto rec = gside_record();
  EXPECT_EQ(rec.frequencies[0][0], 1000);
  EXPECT_NEAR(rec.r[0], 100.0 / (2000 * kPi), 1e-15);
  EXPECT_GT(rec.U[0], 2.0);
  EXPECT_LE(rec.U[0] * rec.r[0], rec.blockLimit);
  EXPECT_NEAR(rec.averaged_density(), 1.03125, 1e-15);
  EXPECT_TRUE(validate_record(rec).empty());
}

TEST(Construction, BudgetAndValidation) {
  ConstructionOptions o;
  o.mode = ConstructionMode::kFull;
  o.delta = 0.5;
  o.integerBudget = 1e10;
  EXPECT_THROW(build_construction(1, {0.1, 0.1}, o), BudgetError);
  o.integerBudget = 9e18;
  EXPECT_THROW(build_construction(1, {0.3}, {}), ConfigError);
  o.delta.reset();
  EXPECT_THROW(build_construction(1, {0.25}, o), ConfigError);
  EXPECT_THROW(build_construction(3, {0.25}, {}), DomainError);
}

TEST(Q, LimitsAndZeroOfTheMultiplier) {
  const auto rec = gside_record();
  EXPECT_NEAR(q_exact(rec, 1e-12), 1.0, 1e-15);
  EXPECT_NEAR(q_exact(rec, 0.5 / 1000.0), 1.0 / 1.03125, 1e-14);
  EXPECT_THROW(q_exact(rec, 0.0), DomainError);
  EXPECT_THROW(q_exact(rec, 0.6), DomainError);
}

TEST(Q, Bounded) {
  const auto rec = gside_record();
  const double half = 0.5 * 0.0625;
  // q - 1 = half (m_1 - 1) / (1 + half), min sin(x)/x = -0.21723362821...
  const double bound = half * 1.2172336282112217 / (1 + half);
  for (double rho : log_grid(1e-7, rec.blockLimit, 500)) EXPECT_LE(std::abs(q_exact(rec, rho) - 1.0), bound + 1e-15);
}

TEST(Q, MonteCarloAgreement) {
  const auto rec = gside_record();
  const auto rows = q_montecarlo_check(rec, log_grid(rec.r[0], rec.U[0] * rec.r[0], 5), 2000000, 11);
  for (const auto &r : rows) EXPECT_LT(std::abs(r.zscore), 4.0) << r.rho;
}

TEST(BlockDeviation, SingleBlock) {
  const auto rec = gside_record();
  const auto b = block_deviation_check(rec, 1);
  EXPECT_TRUE(b.hypothesisHolds);
  EXPECT_LE(b.qMaxOnBlock, 1 - 6.25e-4);
  EXPECT_TRUE(b.deviationPositive);
  EXPECT_TRUE(b.stable);
  EXPECT_GT(b.deviation, b.measuredC * 0.99 * rec.eta[0] * b.blockWeight);
  EXPECT_NEAR(b.measuredC, 105.53, 0.5);  // regression baseline
  EXPECT_THROW(block_deviation_check(rec, 2), DomainError);
}

TEST(BlockDeviation, ControlAwayFromBlocks) {
  const auto c = q_control_check(gside_record());
  EXPECT_TRUE(c.holds);
  EXPECT_LE(c.maxDeviation, c.bound);
}

TEST(BlockProfiles, AlternatingLevelsRealizeBothLimits) {
  const auto [F, centres] = alternating_block_profile(1.0, 2.0, 1.0, 5);
  const auto r = block_limit_realization(F, centres);
  ASSERT_EQ(r.rows.size(), 5u);
  for (std::size_t m = 2; m < r.rows.size(); ++m) {
    EXPECT_LT(r.rows[m].relDeviation, 0.02) << m;
    EXPECT_NEAR(r.rows[m].target, std::sqrt(kPi) * (m % 2 == 0 ? 1.0 : 2.0), 1e-12);
  }
  EXPECT_TRUE(r.sandwichHolds);
  for (std::size_t m = 0; m < r.sandwich.size(); ++m) {
    const auto &row = r.sandwich[m];
    EXPECT_TRUE(row.holds) << m;
    if (m < 2) continue;  // the first blocks are not yet small scale
    EXPECT_GE(row.scaledG, std::sqrt(kPi) * r.globalMin - row.tolerance) << m;
    EXPECT_LE(row.scaledG, std::sqrt(kPi) * r.globalMax + row.tolerance) << m;
  }
}

TEST(BlockProfiles, ConstantProfile) {
  const auto F = synthetic_profile({{1.0, 1.5}}, 2.0);
  const auto r = block_limit_realization(F, {{1e-4, 1.5}, {1e-6, 1.5}});
  for (const auto &row : r.rows) EXPECT_LT(row.relDeviation, 1e-6);
  EXPECT_NEAR(r.rows[0].target, 1.5 * scale_weight_mass(2.0), 1e-12);
}
