#pragma once

#include "muskat/curve.hpp"

#include <functional>

namespace muskat {

// Phi, the far-field quantity xi*(Phi - Phi_inf) and xi*dPhi/dxi - Phi at one (xi, s).
struct WeightSample {
  double phi = 0.0;
  double bar = 0.0;
  double tilde = 0.0;
};

// Kernel weight Phi(xi, s) of the transform together with its far-field data.
// Evaluation goes through a per-s column so that quantities depending on s
// alone are computed once per output point.
class Weight {
 public:
  using Column = std::function<WeightSample(double xi)>;
  using ColumnFactory = std::function<Column(double s)>;

  Weight(ColumnFactory columns, std::function<double(double)> phi_inf);

  static Weight constant(double value);
  // Far-field data from phi alone; the xi-derivative is a central difference
  // with step 1e-4*max(1,|xi|).
  static Weight from_phi(std::function<double(double, double)> phi, std::function<double(double)> phi_inf);

  Column column(double s) const { return columns_(s); }
  WeightSample sample(double xi, double s) const { return columns_(s)(xi); }
  double phi(double xi, double s) const { return sample(xi, s).phi; }
  double phi_bar(double xi, double s) const { return sample(xi, s).bar; }
  double phi_tilde(double xi, double s) const { return sample(xi, s).tilde; }
  double phi_inf(double s) const { return phi_inf_(s); }

  friend Weight operator+(const Weight& a, const Weight& b);
  friend Weight operator*(double k, const Weight& w);

 private:
  ColumnFactory columns_;
  std::function<double(double)> phi_inf_;
};

struct PVConfig {
  // Nodes on |xi| < 1: 32 dyadic panels per side with inner_n/64 nodes each.
  int inner_n = 512;
  double outer_r = 1e4;
  // Outer panels carry 8 nodes; outer_n/8 panels per decade of |xi|.
  int outer_n = 64;

  void validate() const;
  PVConfig refined() const { return {2 * inner_n, 2 * outer_r, 2 * outer_n}; }
};

// T_Phi f(s) = (1/2pi) PV int (f'(s-xi) - f'(s))/xi Phi(xi,s) dxi, evaluated as
// the sum of four absolutely convergent pieces (near field, far-field mean,
// boundary terms at |xi| = 1, integrated-by-parts far field).
double transform(const ScalarField& f, const Weight& weight, double s, const PVConfig& cfg = {});

// The four pieces separately, already divided by 2pi.
struct TransformParts {
  double near = 0.0;
  double far_mean = 0.0;
  double boundary = 0.0;
  double far = 0.0;
  double total() const { return near + far_mean + boundary + far; }
};
TransformParts transform_parts(const ScalarField& f, const Weight& weight, double s, const PVConfig& cfg = {});

Vector transform_grid(const ScalarField& f, const Weight& weight, const Grid& grid, const PVConfig& cfg = {});

// (1/2pi) int of the constant-slope singular profile, by quadrature.
double profile_integral_quadrature(double a, double c, const PVConfig& cfg = {});
// -c (1 - a^2)/(1 + a^2).
double profile_integral_closed(double a, double c);

// (1/2pi) int_R g(xi) dxi over the transform's node layout, for integrands
// decaying like xi^-2; `centre` marks where g may vary on unit scale.
double line_integral(const std::function<double(double)>& g, const PVConfig& cfg = {}, double centre = 0.0);

// Signed quadrature nodes on |xi| < 1 and on 1 < |xi| < R as seen from s.
std::vector<double> inner_nodes(const PVConfig& cfg);
std::vector<double> outer_nodes(double s, const PVConfig& cfg);

// Largest |xi (Phi - Phi_inf) - bar| over the sampled points with |xi| > 1.
double weight_consistency_error(const Weight& weight, const Vector& s_samples, const std::vector<double>& xi_samples);

}  // namespace muskat
