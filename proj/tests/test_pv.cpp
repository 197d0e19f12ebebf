#include "muskat/pv.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace muskat;

namespace {

double lorentzian(double s, int j) {
  const double q = 1.0 / (1.0 + s * s);
  switch (j) {
    case 0: return q;
    case 1: return -2.0 * s * q * q;
    default: return (6.0 * s * s - 2.0) * q * q * q;
  }
}

double hilbert_pair(double s) { return (1.0 - s * s) / (2.0 * (1.0 + s * s) * (1.0 + s * s)); }

// Symmetric PV sum (1/2pi) int_0^L (f'(s-x) - f'(s+x))/x dx by composite
// Simpson with a far tail estimate; independent of the node layout under test.
double brute_force_unit_weight(double s) {
  const double L = 4000.0;
  const long n = 8'000'000;
  const double h = L / n;
  auto g = [s](double x) {
    if (x == 0.0) return -2.0 * lorentzian(s, 2);
    return (lorentzian(s - x, 1) - lorentzian(s + x, 1)) / x;
  };
  double sum = g(0.0) + g(L);
  for (long k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * g(k * h);
  return sum * h / 3.0 / (2.0 * std::numbers::pi);
}

ScalarField odd_bump(double a, double w) {
  return [a, w](double s, int j) {
    const double u = s / w;
    const double e = a * std::exp(-u * u);
    return j == 0 ? u * e : e * (1.0 - 2.0 * u * u) / w;
  };
}

}  // namespace

TEST(PVConfig, Validation) {
  EXPECT_NO_THROW(PVConfig{}.validate());
  EXPECT_THROW((PVConfig{100, 1e4, 64}.validate()), std::invalid_argument);
  EXPECT_THROW((PVConfig{512, 10.0, 64}.validate()), std::invalid_argument);
  EXPECT_THROW((PVConfig{512, 1e4, 60}.validate()), std::invalid_argument);
  const auto nodes = inner_nodes(PVConfig{});
  EXPECT_EQ(nodes.size(), 512u);
  for (double x : nodes) {
    EXPECT_NE(x, 0.0);
    EXPECT_LT(std::abs(x), 1.0);
  }
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const QuadratureRule& rule = gauss_legendre(8);
  for (int p = 0; p <= 15; ++p) {
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    EXPECT_NEAR((rule.weights.array() * rule.nodes.array().pow(p)).sum(), exact, 1e-14) << p;
  }
}

TEST(Transform, ZeroDensity) {
  const ScalarField zero = [](double, int) { return 0.0; };
  EXPECT_EQ(transform(zero, Weight::constant(2.0), 0.3), 0.0);
  const Grid grid(5.0, 11);
  EXPECT_EQ(transform_grid(zero, Weight::constant(1.0), grid).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Transform, BruteForceReproducesHilbertPair) {
  for (double s : {0.0, 0.7, 2.5}) EXPECT_NEAR(brute_force_unit_weight(s), hilbert_pair(s), 1e-7) << s;
}

TEST(Transform, HilbertPairOnHundredOnePoints) {
  const Weight unit = Weight::constant(1.0);
  double worst = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double s = -10.0 + 0.2 * k;
    worst = std::max(worst, std::abs(transform(lorentzian, unit, s) - hilbert_pair(s)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Transform, PartsSumToTotal) {
  const auto parts = transform_parts(lorentzian, Weight::constant(1.0), 0.4);
  EXPECT_NEAR(parts.total(), transform(lorentzian, Weight::constant(1.0), 0.4), 1e-15);
  EXPECT_NE(parts.near, 0.0);
  EXPECT_NE(parts.far, 0.0);
  EXPECT_EQ(parts.far_mean, 0.0);  // constant weight: no far-field mean
}

TEST(Transform, LinearInDensityAndWeight) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  const Grid grid(6.0, 25);
  for (int trial = 0; trial < 3; ++trial) {
    const double a = coeff(rng), b = coeff(rng);
    const ScalarField f = odd_bump(coeff(rng), 0.5 + std::abs(coeff(rng)));
    const ScalarField sum = [&, a, b](double s, int j) { return a * f(s, j) + b * lorentzian(s, j); };
    const Weight w = Weight::from_phi([](double xi, double s) { return 1.0 + s * xi * xi / (1.0 + xi * xi + s * s); },
                                      [](double s) { return 1.0 + s; });
    const Vector lhs = transform_grid(sum, w, grid);
    const Vector rhs = a * transform_grid(f, w, grid) + b * transform_grid(lorentzian, w, grid);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);

    const Weight combo = a * w + b * Weight::constant(1.0);
    const Vector lw = transform_grid(f, combo, grid);
    const Vector rw = a * transform_grid(f, w, grid) + b * transform_grid(f, Weight::constant(1.0), grid);
    EXPECT_LT((lw - rw).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Transform, InconsistentFarFieldIsRejected) {
  const Weight broken([](double) { return Weight::Column([](double) { return WeightSample{1.0, 0.5, -1.0}; }); },
                      [](double) { return 1.0; });
  EXPECT_THROW(transform(lorentzian, broken, 0.0), std::domain_error);
}

TEST(Profile, ClosedFormExamples) {
  EXPECT_EQ(profile_integral_closed(0.0, 1.0), -1.0);
  EXPECT_EQ(profile_integral_closed(1.0, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(profile_integral_closed(-2.0, 1.0), 0.6);
  EXPECT_DOUBLE_EQ(profile_integral_closed(2.0, 1.0), 0.6);
  EXPECT_THROW(profile_integral_closed(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(profile_integral_quadrature(0.0, -1.0), std::invalid_argument);
}

TEST(Profile, QuadratureMatchesClosedForm) {
  for (double a : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0})
    for (double c : {0.5, 1.0, 2.0})
      EXPECT_NEAR(profile_integral_quadrature(a, c), profile_integral_closed(a, c), 1e-6) << a << " " << c;
  EXPECT_NEAR(profile_integral_quadrature(1.0, 5.0), 0.0, 1e-6);
}

TEST(Profile, EvenInSlope) {
  for (double a : {0.5, 1.0, 2.0})
    for (double c : {0.5, 2.0}) EXPECT_NEAR(profile_integral_quadrature(a, c), profile_integral_quadrature(-a, c), 1e-8);
}
