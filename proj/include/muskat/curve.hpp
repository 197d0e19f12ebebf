#pragma once

#include "muskat/numeric.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <utility>

namespace muskat {

// Uniform grid on [-s_max, s_max].
class Grid {
 public:
  Grid(double s_max, Eigen::Index n);

  double s_min() const { return -s_max_; }
  double s_max() const { return s_max_; }
  Eigen::Index size() const { return n_; }
  double spacing() const { return 2.0 * s_max_ / static_cast<double>(n_ - 1); }
  double operator[](Eigen::Index i) const { return -s_max_ + static_cast<double>(i) * spacing(); }
  Vector nodes() const;
  // Index of the node nearest to s (clamped).
  Eigen::Index nearest(double s) const;
  // Same extent, spacing halved.
  Grid refined() const { return Grid(s_max_, 2 * n_ - 1); }

 private:
  double s_max_;
  Eigen::Index n_;
};

// A function of s known through its value and derivatives.
using ScalarField = std::function<double(double s, int order)>;

enum class Extension {
  none,             // evaluation outside the samples is an error
  algebraic_tail,   // a/s^2 + b/s^3 matched in value and slope at each end
};

// Grid samples with derivatives from 4th-order differences and a C^2
// piecewise quintic Hermite interpolant between the nodes.
class SampledFunction {
 public:
  SampledFunction(Grid grid, Vector values, Extension extension = Extension::algebraic_tail);

  static SampledFunction zero(Grid grid) { return {grid, Vector::Zero(grid.size())}; }

  const Grid& grid() const { return grid_; }
  const Vector& values() const { return d_[0]; }
  // Nodal derivative samples, order 0..3.
  const Vector& derivative(int order) const;
  // j-th derivative at an arbitrary point; j = 3 is only piecewise continuous.
  double operator()(double s, int j = 0) const;
  bool identically_zero() const { return zero_; }
  ScalarField field() const;

 private:
  double tail(double s, int j, int end) const;

  Grid grid_;
  std::array<Vector, 4> d_;
  Extension extension_;
  // Tail coefficients (a, b) at the left and right ends.
  std::array<Eigen::Vector2d, 2> tail_{};
  bool zero_ = false;
};

enum class CurveKind { flat, tilted, gaussian_bump, rational_bump, sampled };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& name);

// Initial interface z0(s) = beta*s + perturbation(s).
class Curve {
 public:
  static Curve flat(double alpha = 0.5);
  static Curve tilted(double beta, double alpha = 0.5);
  static Curve gaussian_bump(double amplitude, double width, double beta = 0.0, double alpha = 0.5);
  static Curve rational_bump(double amplitude, double width, double beta = 0.0, double alpha = 0.5);
  static Curve sampled(const Grid& grid, const Vector& perturbation, double beta = 0.0, double alpha = 0.5,
                       Extension extension = Extension::none);

  CurveKind kind() const { return kind_; }
  double beta() const { return beta_; }
  double alpha() const { return alpha_; }
  double amplitude() const { return amplitude_; }
  double width() const { return width_; }

  // d^j/ds^j of the full curve, j <= 3.
  double eval(double s, int j = 0) const;
  // d^j/ds^j of the decaying part, j <= 3.
  double perturbation(double s, int j = 0) const;
  ScalarField perturbation_field() const;
  // Perturbation and its derivatives sampled on a grid, orders 0..k.
  std::vector<Vector> perturbation_samples(const Grid& grid, int k) const;
  bool has_zero_perturbation() const;

 private:
  Curve(CurveKind kind, double beta, double alpha, double amplitude, double width);

  CurveKind kind_;
  double beta_;
  double alpha_;
  double amplitude_;
  double width_;
  std::shared_ptr<const SampledFunction> samples_;
};

// z(s,t) = z0(s) + t z1(s) + t^2/2 z2(s) at a fixed t.
class CurveSlice {
 public:
  explicit CurveSlice(Curve z0);
  CurveSlice(Curve z0, std::shared_ptr<const SampledFunction> z1, std::shared_ptr<const SampledFunction> z2,
             double t);

  double t() const { return t_; }
  double beta() const { return z0_.beta(); }
  const Curve& initial() const { return z0_; }
  double eval(double s, int j = 0) const;
  double perturbation(double s, int j = 0) const;
  ScalarField perturbation_field() const;
  ScalarField field() const;

 private:
  Curve z0_;
  std::shared_ptr<const SampledFunction> z1_;
  std::shared_ptr<const SampledFunction> z2_;
  double t_ = 0.0;
};

// sup over nodes s and offsets 0 < |xi| <= 1 of (1+|s|^(1+alpha))|f(s-xi)-f(s)|/|xi|^alpha.
double holder_seminorm_star(const Vector& f, double alpha, const Grid& grid);

// sup_{j<=k} (1+|s|^(1+alpha))|f^(j)| + [f^(k)]*_alpha; derivatives[j] holds f^(j).
double norm_k_alpha_star(const std::vector<Vector>& derivatives, int k, double alpha, const Grid& grid);

// sup over nodes of (1+|s|^(1+alpha))|f|.
double weighted_sup(const Vector& f, double alpha, const Grid& grid);

// Affine map rho -> (rho - b)/a sending {rho_plus, rho_minus} to {+1, -1}.
std::pair<double, double> normalize_densities(double rho_plus, double rho_minus);

}  // namespace muskat
