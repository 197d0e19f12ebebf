#pragma once

#include "muskat/pv.hpp"

#include <utility>
#include <vector>

namespace muskat {

// Z(xi, s) = (z(s) - z(s - xi))/xi, with Z(0, s) = dz/ds(s).
class SlopeQuotient {
 public:
  explicit SlopeQuotient(CurveSlice z) : z_(std::move(z)) {}
  double operator()(double xi, double s) const;
  const CurveSlice& curve() const { return z_; }

 private:
  CurveSlice z_;
};

// One summand weight * xi^2/(xi^2 + (z(s) - z(s-xi) + shift)^2).
struct ShiftedTerm {
  double weight;
  double shift;
};

// Sum of shifted quotient terms with analytic far-field data.
Weight shifted_quotient_kernel(const CurveSlice& z, std::vector<ShiftedTerm> terms);

// 2 xi^2/(xi^2 + (z0(s-xi) - z0(s))^2).
Weight phi0(const Curve& z0);

// xi^2/(xi^2 + dz^2) + xi^2/(xi^2 + (dz -+ 2ct)^2), dz = z(s-xi) - z(s); sign = +1 or -1.
Weight phi_pm(const CurveSlice& z, double c, double t, int sign);

// -4 Z0 Z0'/(1 + Z0^2)^2 where Z0' is the slope quotient of the first-order
// velocity z1 (value and first derivative are used).
Weight phi1(const Curve& z0, const ScalarField& z1);

// Pair weight of interfaces i and j; c_i is signed (c_{-i} = -c_i).
Weight phi_ij(const CurveSlice& z, double c_i, double c_j, double t);

// Regular and singular parts of (phi_ij + phi_{-i,j})/2 - phi0.
std::pair<Weight, Weight> delta_split(const CurveSlice& z, const Curve& z0, double c_i, double c_j, double t);

// Singular part of the two-interface split at (t*xi, s), rescaled; at t = 0
// the constant-slope limit with slope dz0/ds(s).
double rescaled_profile(const CurveSlice& z, const Curve& z0, double c, double t, double xi, double s);

struct WeightReport {
  double sup_phi_inner = 0.0;    // |Phi| on |xi| <= 1
  double sup_bar_outer = 0.0;    // |xi (Phi - Phi_inf)| on |xi| > 1
  double sup_tilde_outer = 0.0;  // |xi dPhi/dxi - Phi| on |xi| > 1
  double norm0 = 0.0;            // sum of the three
};

WeightReport weight_norm0(const Weight& weight, const Vector& s_samples, const std::vector<double>& xi_samples);

// Quadrature nodes as seen from s = 0 plus the dyadic points +-2^k, |k| <= 20.
std::vector<double> norm_xi_samples(const PVConfig& cfg = {});

}  // namespace muskat
