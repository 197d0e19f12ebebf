#include "muskat/curve.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace muskat;

namespace {

double lorentzian(double s) { return 1.0 / (1.0 + s * s); }

Vector sample(const Grid& grid, double (*f)(double)) {
  Vector v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return v;
}

// Plain double loop over every node pair with offset at most 1.
double brute_force_seminorm(double (*f)(double), double alpha, double s_max, Eigen::Index n) {
  const double h = 2.0 * s_max / (n - 1);
  const auto m_max = static_cast<Eigen::Index>(std::floor(1.0 / h + 1e-9));
  double best = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = -s_max + i * h;
    for (Eigen::Index m = -m_max; m <= m_max; ++m) {
      if (m == 0 || i - m < 0 || i - m >= n) continue;
      const double xi = m * h;
      const double q = (1.0 + std::pow(std::abs(s), 1.0 + alpha)) * std::abs(f(s - xi) - f(s)) / std::pow(std::abs(xi), alpha);
      best = std::max(best, q);
    }
  }
  return best;
}

}  // namespace

TEST(Grid, SpacingAndSymmetry) {
  const Grid grid(40.0, 4001);
  EXPECT_DOUBLE_EQ(grid.spacing(), 0.02);
  EXPECT_DOUBLE_EQ(grid[0], -40.0);
  EXPECT_NEAR(grid[2000], 0.0, 1e-14);
  EXPECT_EQ(grid.refined().size(), 8001);
  EXPECT_THROW(Grid(0.0, 10), std::invalid_argument);
  EXPECT_THROW(Grid(1.0, 1), std::invalid_argument);
}

TEST(Curve, CatalogExamples) {
  EXPECT_EQ(Curve::flat().eval(3.7, 0), 0.0);
  EXPECT_EQ(Curve::tilted(2.0).eval(1.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(Curve::gaussian_bump(1.0, 1.0).eval(0.0, 2), -2.0);
  EXPECT_THROW(Curve::flat().eval(0.0, 4), std::out_of_range);
  EXPECT_THROW(Curve::flat(1.0), std::invalid_argument);
  EXPECT_THROW(Curve::flat(0.0), std::invalid_argument);
}

TEST(Curve, AnalyticDerivativesMatchDifferences) {
  for (const Curve& c : {Curve::gaussian_bump(0.3, 1.7, 0.4), Curve::rational_bump(-0.8, 0.6, -1.0)}) {
    for (double s : {-2.3, -0.4, 0.0, 0.9, 3.1}) {
      for (int j = 0; j < 3; ++j) {
        const double d = 1e-4;
        const double fd = (c.eval(s + d, j) - c.eval(s - d, j)) / (2.0 * d);
        EXPECT_NEAR(c.eval(s, j + 1), fd, 1e-6) << to_string(c.kind()) << " s=" << s << " j=" << j;
      }
    }
  }
}

TEST(Curve, LinearInAmplitude) {
  for (double s : {-1.5, 0.2, 4.0}) {
    for (int j = 0; j <= 3; ++j) {
      EXPECT_NEAR(Curve::gaussian_bump(0.6, 1.2).perturbation(s, j), 3.0 * Curve::gaussian_bump(0.2, 1.2).perturbation(s, j), 1e-15);
      EXPECT_NEAR(Curve::rational_bump(0.6, 1.2).perturbation(s, j), 3.0 * Curve::rational_bump(0.2, 1.2).perturbation(s, j), 1e-15);
    }
  }
}

TEST(Curve, DecayKicksInAtGridEnds) {
  const Grid grid(40.0, 4001);
  for (const Curve& c : {Curve::gaussian_bump(0.1, 1.0), Curve::rational_bump(0.5, 2.0)}) {
    const auto d = c.perturbation_samples(grid, 3);
    for (int j = 0; j <= 3; ++j) {
      const Vector w = (1.0 + grid.nodes().array().abs().pow(1.0 + c.alpha())) * d[j].array().abs();
      EXPECT_LT(w[0], w.maxCoeff());
      EXPECT_LT(w[grid.size() - 1], w.maxCoeff());
    }
  }
}

TEST(SampledFunction, FourthOrderDerivatives) {
  const Curve bump = Curve::gaussian_bump(1.0, 1.0);
  double previous = 0.0;
  for (Eigen::Index n : {401, 801}) {
    const Grid grid(8.0, n);
    SampledFunction f(grid, bump.perturbation_samples(grid, 0)[0]);
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (int j = 1; j <= 3; ++j) err = std::max(err, std::abs(f.derivative(j)[i] - bump.perturbation(grid[i], j)));
    if (previous > 0.0) EXPECT_GT(previous / err, 12.0);
    previous = err;
  }
  EXPECT_LT(previous, 1e-5);
}

TEST(SampledFunction, HermiteInterpolationAndTail) {
  const Grid grid(20.0, 2001);
  const Curve bump = Curve::rational_bump(1.0, 1.0);
  SampledFunction f(grid, bump.perturbation_samples(grid, 0)[0]);
  for (double s : {-3.333, -0.017, 0.5049, 7.77}) {
    EXPECT_NEAR(f(s, 0), bump.perturbation(s, 0), 1e-9);
    EXPECT_NEAR(f(s, 1), bump.perturbation(s, 1), 1e-7);
    EXPECT_NEAR(f(s, 2), bump.perturbation(s, 2), 1e-4);
  }
  // 1/(1+s^2) is close to s^-2 - s^-4: the matched tail is accurate far out.
  EXPECT_NEAR(f(30.0, 0), bump.perturbation(30.0, 0), 1e-6);
  EXPECT_NEAR(f(-400.0, 0), bump.perturbation(-400.0, 0), 1e-7);
  EXPECT_NEAR(f(grid.s_max(), 0), f(grid.s_max() + 1e-9, 0), 1e-12);

  SampledFunction strict(grid, f.values(), Extension::none);
  EXPECT_THROW(strict(20.5, 0), std::out_of_range);
  const Curve sampled = Curve::sampled(grid, f.values());
  EXPECT_THROW(sampled.eval(-21.0, 0), std::out_of_range);
  EXPECT_NEAR(sampled.eval(1.0, 1), bump.eval(1.0, 1), 1e-7);
}

TEST(Holder, TrivialCases) {
  const Grid grid(10.0, 1001);
  EXPECT_EQ(holder_seminorm_star(Vector::Zero(grid.size()), 0.5, grid), 0.0);
  EXPECT_EQ(holder_seminorm_star(Vector::Ones(grid.size()), 0.5, grid), 0.0);
  EXPECT_THROW(holder_seminorm_star(Vector(), 0.5, grid), std::invalid_argument);
}

TEST(Holder, MatchesBruteForceAtDoubledResolution) {
  const Grid coarse(40.0, 4001);
  const double estimate = holder_seminorm_star(sample(coarse, lorentzian), 0.5, coarse);
  const double reference = brute_force_seminorm(lorentzian, 0.5, 40.0, 8001);
  EXPECT_LE(estimate, reference * (1.0 + 1e-12));
  EXPECT_GT(estimate, 0.95 * reference);
}

TEST(Holder, MonotoneUnderRefinement) {
  double previous = 0.0;
  for (Eigen::Index n : {401, 801, 1601, 3201}) {
    const Grid grid(20.0, n);
    const double v = holder_seminorm_star(sample(grid, lorentzian), 0.3, grid);
    EXPECT_GE(v, previous);
    previous = v;
  }
}

TEST(Norms, WeightedSupOfLorentzian) {
  const Grid grid(40.0, 4001);
  // Dense search of (1+|s|^1.5)/(1+s^2) on [0, 40].
  double dense = 0.0;
  for (int k = 0; k <= 4000000; ++k) {
    const double s = 1e-5 * k;
    dense = std::max(dense, (1.0 + std::pow(s, 1.5)) / (1.0 + s * s));
  }
  const Vector f = sample(grid, lorentzian);
  const double sup = weighted_sup(f, 0.5, grid);
  EXPECT_LE(sup, dense);
  EXPECT_NEAR(sup, dense, 1e-4);
  EXPECT_NEAR(norm_k_alpha_star({f}, 0, 0.5, grid), sup + holder_seminorm_star(f, 0.5, grid), 1e-15);
}

TEST(Norms, ZeroAndMissingSamples) {
  const Grid grid(10.0, 501);
  const Vector z = Vector::Zero(grid.size());
  EXPECT_EQ(norm_k_alpha_star({z, z}, 1, 0.5, grid), 0.0);
  const auto tilted = Curve::tilted(1.5).perturbation_samples(grid, 3);
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(norm_k_alpha_star(tilted, k, 0.5, grid), 0.0);
  EXPECT_THROW(norm_k_alpha_star({z}, 1, 0.5, grid), std::invalid_argument);
}

TEST(Densities, Normalization) {
  EXPECT_EQ(normalize_densities(1.0, -1.0), std::make_pair(1.0, 0.0));
  EXPECT_EQ(normalize_densities(3.0, 1.0), std::make_pair(1.0, 2.0));
  EXPECT_EQ(normalize_densities(0.0, 2.0), std::make_pair(-1.0, 1.0));
  EXPECT_THROW(normalize_densities(1.0, 1.0), std::invalid_argument);
  for (auto [p, m] : {std::pair{5.0, -2.0}, std::pair{-0.3, 0.9}}) {
    const auto [a, b] = normalize_densities(p, m);
    EXPECT_DOUBLE_EQ((p - b) / a, 1.0);
    EXPECT_DOUBLE_EQ((m - b) / a, -1.0);
    EXPECT_DOUBLE_EQ(a * 1.0 + b, p);
  }
}
