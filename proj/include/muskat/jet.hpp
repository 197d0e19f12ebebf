#pragma once

#include "muskat/kernels.hpp"

#include <memory>
#include <string>
#include <vector>

namespace muskat {

// Unstable: heavier fluid (rho = +1) on top.
enum class Regime { unstable, stable };

// (rho_plus - rho_minus)/2 in the normalized densities.
inline double regime_sign(Regime r) { return r == Regime::unstable ? 1.0 : -1.0; }
std::string to_string(Regime r);
Regime regime_from_string(const std::string& name);

// Interface speeds 0 < c_1 < ... < c_N.
class SpeedFamily {
 public:
  explicit SpeedFamily(std::vector<double> speeds);
  // c_i = (2i-1)/N - eps.
  static SpeedFamily near_max(int n, double eps);

  int size() const { return static_cast<int>(speeds_.size()); }
  // 1-based; negative indices give c_{-i} = -c_i.
  double speed(int i) const;
  double outer() const { return speeds_.back(); }
  const std::vector<double>& values() const { return speeds_; }
  // Indices i with c_i >= (2i-1)/N.
  std::vector<int> bound_violations() const;

 private:
  std::vector<double> speeds_;
};

// (1 - a^2)/(1 + a^2)^2 with a = dz0/ds(s).
double sigma(const Curve& z0, double s);
// (1/N^2) sum_{i,j} max(c_i, c_j).
double cbar(const SpeedFamily& speeds);
// Largest admissible mixing speed: 1 unstable; else
// |beta| (|beta| - slope_norm)/(2 (1 + |beta| slope_norm)).
double c_max(Regime regime, double beta, double slope_norm);

// z(s,t) = z0 + t z1 + t^2/2 z2 on a grid.
struct InterfaceJet {
  Curve z0;
  std::shared_ptr<const SampledFunction> z1;
  std::shared_ptr<const SampledFunction> z2;
  Grid grid;
  SpeedFamily speeds;
  Regime regime;
  double cbar;

  CurveSlice slice(double t) const { return CurveSlice(z0, z1, z2, t); }
  double dz_dt(double s, double t) const;
  double z_at(double s, double t, int j = 0) const;
};

InterfaceJet build_jet(const Curve& z0, const SpeedFamily& speeds, Regime regime, const Grid& grid,
                       const PVConfig& cfg = {});

// Classical right-hand side of the interface equation at t = 0, by adaptive
// quadrature of the symmetrized contour kernel. Independent of transform().
double muskat_rhs(const Curve& z0, double s, Regime regime, double tol = 1e-11);

// (1/N) sum_j Phi_{i,j} as a single weight.
Weight averaged_pair_weight(const CurveSlice& z, const SpeedFamily& speeds, int i, double t);

// Normal velocity on interface i (signed, i != 0).
double normal_velocity(const InterfaceJet& jet, int i, double t, double s, const PVConfig& cfg = {});
Vector normal_velocity_grid(const InterfaceJet& jet, int i, double t, const PVConfig& cfg = {});
// Same on an arbitrary grid inside the jet's domain.
Vector normal_velocity_grid(const InterfaceJet& jet, int i, double t, const Grid& grid, const PVConfig& cfg = {});

// Integral over (0, inf) of g(x) + g(-x) for g varying on unit scale up to
// |x| ~ reach and decaying like x^-2 beyond.
double symmetric_line_integral(const std::function<double(double)>& g, double reach, double tol);

}  // namespace muskat
