#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "kuzlab/measures.hpp"

using namespace kuzlab;
constexpr double kPi = std::numbers::pi;

namespace {

MeasureModel fourier_single(double a = 0.2, std::int64_t k = 5) {
  return FourierWeighted{SubtorusLebesgue{2, 1, {0.5}}, {{{k}, a}}};
}

MeasureModel canonical_cantor() { return make_cantor_circle(1.0); }

std::vector<MeasureModel> model_matrix() {
  std::vector<MeasureModel> v{make_circle(), make_circle(3, 0.25), canonical_cantor(), make_cantor_circle(0.5),
                              fourier_single(), SubtorusLebesgue{3, 2, {0.7}}};
  DigitSelfSimilar carpet;
  carpet.n = 3;
  carpet.axes = {DigitAxis{4, {0, 3}, 0.8}, FullAxis{}};
  carpet.normal_offset = {0.1};
  v.push_back(carpet);
  v.push_back(Mixture{{make_circle(2, 0.2), make_circle(2, 0.7)}});
  return v;
}

// Empirical coefficient (1/N) sum e^{-2 pi i k.x}.
std::complex<double> empirical_coefficient(const std::vector<TorusPoint> &pts, const LatticeVector &k) {
  std::complex<double> acc{0, 0};
  for (const auto &p : pts) {
    double ph = 0;
    for (std::size_t a = 0; a < k.size(); ++a) ph += static_cast<double>(k[a]) * p.coords[a];
    acc += std::polar(1.0, -2.0 * kPi * ph);
  }
  return acc / static_cast<double>(pts.size());
}

}  // namespace

TEST(Validation, RejectsBadModels) {
  EXPECT_THROW((MeasureModel{SubtorusLebesgue{2, 3, {}}}), ConfigError);
  EXPECT_THROW((MeasureModel{SubtorusLebesgue{2, 1, {}}}), ConfigError);
  EXPECT_THROW((MeasureModel{SubtorusLebesgue{2, 1, {1.5}}}), ConfigError);
  DigitSelfSimilar d;
  d.n = 2;
  d.normal_offset = {0.5};
  d.axes = {DigitAxis{2, {0, 1}, 1.0}};
  EXPECT_THROW(MeasureModel{d}, ConfigError);
  d.axes = {DigitAxis{3, {0, 1}, 1.0}};
  EXPECT_THROW(MeasureModel{d}, ConfigError);
  d.axes = {DigitAxis{3, {0, 2}, 1.5}};
  EXPECT_THROW(MeasureModel{d}, ConfigError);
  EXPECT_THROW(fourier_single(0.3), ConfigError);
  EXPECT_THROW((MeasureModel{FourierWeighted{SubtorusLebesgue{2, 1, {0.5}}, {{{3}, 0.1}, {{-3}, 0.1}}}}),
               ConfigError);
  EXPECT_THROW((MeasureModel{Mixture{{make_circle(2), make_circle(3)}}}), ConfigError);
}

TEST(Dimensions, ReportedPerVariant) {
  EXPECT_EQ(make_circle().dimension(), 1.0);
  EXPECT_NEAR(canonical_cantor().dimension(), std::log(2.0) / std::log(3.0), 1e-15);
  const MeasureModel mix = Mixture{{make_circle(3, 0.3), SubtorusLebesgue{3, 2, {0.7}}}};
  EXPECT_EQ(mix.dimension(), 2.0);
  EXPECT_EQ(mix.growth_dimension(), 1.0);
  EXPECT_EQ(mix.ambient_dimension(), 3);
}

TEST(TotalMass, Examples) {
  EXPECT_EQ(total_mass(make_circle()), 1.0);
  EXPECT_EQ(total_mass(fourier_single()), 1.0);
  EXPECT_EQ(total_mass(Mixture{{make_circle(2, 0.1), make_circle(2, 0.6)}}), 2.0);
}

TEST(FourierCoefficient, Lebesgue) {
  const MeasureModel mu = SubtorusLebesgue{2, 1, {0.0}};
  EXPECT_NEAR(std::abs(fourier_coefficient(mu, {3, 7})), 0.0, 1e-15);
  const auto c = fourier_coefficient(mu, {0, 7});
  EXPECT_NEAR(c.real(), 1.0, 1e-15);
  EXPECT_NEAR(c.imag(), 0.0, 1e-15);
  // normal phase e^{-2 pi i k2 / 2}
  EXPECT_NEAR(fourier_coefficient(make_circle(), {0, 1}).real(), -1.0, 1e-15);
}

TEST(FourierCoefficient, CantorModulusAgainstCosineProduct) {
  double prod = 1.0;
  for (int j = 1; j <= 40; ++j) prod *= std::abs(std::cos(2.0 * kPi * std::pow(3.0, -j)));
  EXPECT_NEAR(std::abs(fourier_coefficient(canonical_cantor(), {1, 0})), prod, 1e-14);
  EXPECT_NEAR(prod, 0.3714, 5e-5);
}

TEST(FourierCoefficient, CantorAgainstMonteCarlo) {
  // Independent sampler: random ternary digits from a Mersenne twister.
  std::mt19937_64 gen(12345);
  std::bernoulli_distribution coin(0.5);
  const int N = 1000000;
  std::complex<double> acc{0, 0};
  for (int i = 0; i < N; ++i) {
    double x = 0, w = 1.0 / 3.0;
    for (int j = 0; j < 34; ++j, w /= 3.0)
      if (coin(gen)) x += 2.0 * w;
    acc += std::polar(1.0, -2.0 * kPi * x);
  }
  acc /= static_cast<double>(N);
  const auto c = fourier_coefficient(canonical_cantor(), {1, 0});
  EXPECT_NEAR(std::abs(acc - c), 0.0, 4.0 / std::sqrt(N));
}

TEST(FourierCoefficient, FourierWeightedModeSplitting) {
  const auto c = fourier_coefficient(fourier_single(0.2, 5), {5, 0});
  EXPECT_NEAR(c.real(), 0.1, 1e-15);
  EXPECT_NEAR(c.imag(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(fourier_coefficient(fourier_single(0.2, 5), {4, 0})), 0.0, 1e-15);
  EXPECT_NEAR(fourier_coefficient(fourier_single(0.2, 5), {0, 0}).real(), 1.0, 1e-15);
}

TEST(FourierCoefficient, FourierWeightedAgainstQuadrature) {
  const auto mu = fourier_single(0.2, 5);
  for (std::int64_t k : {1, 4, 5, 6}) {
    auto re = [&](double x) { return (1 + 0.2 * std::cos(2 * kPi * 5 * x)) * std::cos(2 * kPi * k * x); };
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(re, 0.0, 1.0, 10, 1e-14);
    EXPECT_NEAR(fourier_coefficient(mu, {k, 0}).real(), q, 1e-12) << k;
  }
}

TEST(FourierCoefficient, DigitTruncationIsConverged) {
  const DigitAxis a{3, {0, 2}, 1.0};
  for (double k : {1.0, 7.0, 123.0, 2000.0, 10000.0}) {
    const double c30 = std::abs(digit_axis_coefficient(a, k, 30));
    const double c60 = std::abs(digit_axis_coefficient(a, k, 60));
    EXPECT_LT(std::abs(c30 - c60), 1e-12) << k;
  }
}

TEST(Sampling, SubtorusSupport) {
  const auto pts = sample(make_circle(), 1, 3);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto &p : pts) EXPECT_EQ(p.coords[1], 0.5);
}

TEST(Sampling, DeterministicPerIndex) {
  const auto a = sample(canonical_cantor(), 9, 10);
  const auto b = sample(canonical_cantor(), 9, 20);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a[i].coords, b[i].coords);
  const auto c = sample(canonical_cantor(), 10, 10);
  EXPECT_NE(a[0].coords, c[0].coords);
}

TEST(Sampling, DigitSamplesLieInSupport) {
  for (const auto &mu : {canonical_cantor(), make_cantor_circle(0.5)})
    for (const auto &x : sample(mu, 4, 50)) EXPECT_GT(ball_mass(mu, x, 1e-9), 0.0);
}

TEST(Sampling, FourierWeightedCosineMean) {
  const auto pts = sample(fourier_single(0.2, 5), 2, 1000000);
  double m = 0, m2 = 0;
  for (const auto &p : pts) {
    const double c = std::cos(2 * kPi * 5 * p.coords[0]);
    m += c;
    m2 += c * c;
  }
  m /= pts.size();
  const double se = std::sqrt((m2 / pts.size() - m * m) / pts.size());
  EXPECT_NEAR(m, 0.1, 3 * se);
}

TEST(BallMass, Lebesgue) {
  const auto mu = make_circle();
  EXPECT_NEAR(ball_mass(mu, {{0.3, 0.5}}, 0.1), 0.2, 1e-15);
  EXPECT_EQ(ball_mass(mu, {{0.3, 0.7}}, 0.1), 0.0);
  EXPECT_NEAR(ball_mass(mu, {{0.3, 0.56}}, 0.1), 0.16, 1e-12);
  const MeasureModel plane = SubtorusLebesgue{3, 2, {0.7}};
  EXPECT_NEAR(ball_mass(plane, {{0.1, 0.9, 0.7}}, 0.2), kPi * 0.04, 1e-14);
}

TEST(BallMass, FourierWeightedAgainstQuadrature) {
  const auto mu = fourier_single(0.2, 5);
  for (double x0 : {0.0, 0.13, 0.5}) {
    auto w = [](double y) { return 1 + 0.2 * std::cos(2 * kPi * 5 * y); };
    const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(w, x0 - 0.07, x0 + 0.07, 5, 1e-14);
    EXPECT_NEAR(ball_mass(mu, {{x0, 0.5}}, 0.07), q, 1e-12) << x0;
  }
}

TEST(BallMass, CantorExactCellMasses) {
  // The ball of radius 3^-m at 0 covers the first cell [0, 3^-m] and, through
  // the wrap at 0 = 1, the last cell [1 - 3^-m, 1]: 2 * 2^-m.
  for (int m = 1; m <= 10; ++m) {
    const double r = std::pow(3.0, -m);
    EXPECT_NEAR(ball_mass(canonical_cantor(), {{0.0, 0.5}}, r), 2.0 * std::pow(2.0, -m), 1e-12) << m;
    EXPECT_NEAR(ball_mass(make_cantor_circle(0.5), {{0.0, 0.5}}, 0.5 * r), std::pow(2.0, -m), 1e-12) << m;
  }
}

TEST(BallMass, CantorSelfSimilarity) {
  const auto mu = canonical_cantor();
  for (double r : {0.3, 0.21, 0.117, 0.05}) {
    const double big = ball_mass(mu, {{0.0, 0.5}}, r);
    EXPECT_NEAR(ball_mass(mu, {{0.0, 0.5}}, r / 3.0), big / 2.0, 1e-12) << r;
  }
}

TEST(AveragedDensity, Examples) {
  EXPECT_EQ(averaged_density_exact(make_circle()).value(), 1.0);
  EXPECT_NEAR(averaged_density_exact(fourier_single(0.1)).value(), 1.005, 1e-15);
  EXPECT_FALSE(averaged_density_exact(canonical_cantor()).has_value());
  EXPECT_FALSE(averaged_density_exact(SubtorusLebesgue{2, 0, {0.5, 0.5}}).has_value());
  EXPECT_EQ(averaged_density_exact(Mixture{{make_circle(2, 0.1), make_circle(2, 0.6)}}).value(), 2.0);
  EXPECT_FALSE(averaged_density_exact(Mixture{{make_circle(3, 0.3), SubtorusLebesgue{3, 2, {0.7}}}}).has_value());
}

TEST(Hermitian, AllVariants) {
  std::mt19937_64 gen(77);
  for (const auto &mu : model_matrix()) {
    const int n = mu.ambient_dimension();
    std::uniform_int_distribution<std::int64_t> pick(-40, 40);
    for (int i = 0; i < 100; ++i) {
      LatticeVector k(n), mk(n);
      for (int a = 0; a < n; ++a) mk[a] = -(k[a] = pick(gen));
      const auto c = fourier_coefficient(mu, k);
      const auto d = fourier_coefficient(mu, mk);
      EXPECT_NEAR(std::abs(c - std::conj(d)), 0.0, 1e-14) << mu.describe();
    }
  }
}

TEST(Ahlfors, CanonicalCantorBallBounds) {
  const auto mu = canonical_cantor();
  const double s = mu.dimension();
  double lo = INFINITY, hi = 0;
  for (const auto &x : sample(mu, 21, 200))
    for (int m = 3; m <= 10; ++m) {
      const double r = std::pow(3.0, -m);
      const double q = ball_mass(mu, x, r) / std::pow(r, s);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  EXPECT_GE(lo, 0.2);
  EXPECT_LE(hi, 5.0);
}

TEST(Sampling, EmpiricalCoefficientsMatch) {
  std::mt19937_64 gen(5);
  for (const auto &mu : model_matrix()) {
    if (std::holds_alternative<Mixture>(mu.variant())) continue;
    const int n = mu.ambient_dimension();
    const auto pts = sample(mu, 31, 1000000);
    std::uniform_int_distribution<std::int64_t> pick(-14, 14);
    for (int i = 0; i < 20;) {
      LatticeVector k(n);
      for (auto &v : k) v = pick(gen);
      if (lattice_norm_squared(k) > 400) continue;
      ++i;
      const auto c = fourier_coefficient(mu, k);
      EXPECT_LT(std::abs(empirical_coefficient(pts, k) - c), 4.0 / std::sqrt(1e6)) << mu.describe();
    }
  }
}
