#pragma once

#include "muskat/jet.hpp"

#include <array>
#include <optional>
#include <vector>

namespace muskat {

// Region between neighbouring interfaces: 0 is the central band, +-N the pure
// phases. Points on an interface belong to the region above it.
struct RegionLabel {
  int index = 0;
  bool on_lower_boundary = false;
};

// Classification by the offset lambda = x2 - z(x1, t).
RegionLabel classify_offset(double lambda, double t, const SpeedFamily& speeds);
RegionLabel classify(const Point& x, double t, const InterfaceJet& jet);

// sign * i/N with sign = +1 unstable (heavy phase on top), -1 stable.
double density(const RegionLabel& label, int n, Regime regime = Regime::unstable);

// Velocity from the contour formula, summed over the 2N interfaces with
// density jump 1/N each, on the transform's node layout centred at x1.
// Throws std::domain_error exactly on an interface.
Point full_velocity(const Point& x, double t, const InterfaceJet& jet, const PVConfig& cfg = {});

// Integral from 0 of the piecewise linear interpolant of nodal rates; the
// rate is extended by constants beyond the grid.
class AnchoredIntegral {
 public:
  AnchoredIntegral(Grid grid, Vector rates);

  const Grid& grid() const { return grid_; }
  const Vector& rates() const { return rates_; }
  double rate(double s) const;
  double value(double s) const;
  // Second-order difference of the nodal values: the tangential derivative
  // as a trace computed from g alone.
  double difference_rate(Eigen::Index k) const;

 private:
  double cumulative(double s) const;

  Grid grid_;
  Vector rates_;
  Vector cumulative_;
  double anchor_ = 0.0;
};

// Phi_t(s, lambda) = (s - b lambda, z(s - b lambda, t) + lambda), b = beta/(1+beta^2);
// b = 0 is the plain band parametrization.
class ShearMap {
 public:
  ShearMap(CurveSlice z, double shear) : z_(std::move(z)), shear_(shear) {}
  double shear() const { return shear_; }
  Point forward(double s, double lambda) const;
  // (s, lambda) of a point.
  Point inverse(const Point& x) const;
  // DPsi^T at x, so that grad g(x) = DPsi^T grad ghat(Psi(x)).
  Eigen::Matrix2d inverse_jacobian_transpose(const Point& x) const;

 private:
  CurveSlice z_;
  double shear_;
};

// ghat and its band-coordinate partials in the central band.
struct InnerPotential {
  double g = 0.0;
  double dg_ds = 0.0;
  double dg_dlambda = 0.0;
  Point grad = Point::Zero();
};

struct PotentialSample {
  double g = 0.0;
  Point grad = Point::Zero();
};

// Band potentials at one time t > 0: normal velocities and the boundary
// rates h on every interface, the x1-only potentials of the bands
// 1 <= |i| <= N-1 (g = 0 in the pure phases) and the two edge integrals
// interpolated linearly in lambda across the central band.
// Staircases (N > 1) are built in the unstable regime only.
class GFamily {
 public:
  GFamily(const InterfaceJet& jet, double t, const Grid& grid, const PVConfig& cfg = {});
  GFamily(const InterfaceJet& jet, double t, const PVConfig& cfg = {}) : GFamily(jet, t, jet.grid, cfg) {}

  int count() const { return n_; }
  double t() const { return t_; }
  Regime regime() const { return regime_; }
  const SpeedFamily& speeds() const { return speeds_; }
  const Grid& grid() const { return grid_; }
  const CurveSlice& curve() const { return z_; }
  const ShearMap& shear_map() const { return shear_map_; }

  const Vector& dz_dt() const { return dz_dt_; }
  // i = +-1..+-N.
  const Vector& normal_velocity(int i) const;
  const Vector& h(int i) const;
  // d/dx1 g^(i) at the nodes, 1 <= |i| <= N (zero for |i| = N).
  Vector band_rate(int i) const;
  // g^(i) for 1 <= |i| <= N-1.
  const AnchoredIntegral& band(int i) const;
  // ghat(s, +-c1 t) = edge_lead() s + edge(+-1).value(s -+ b c1 t); the lead is
  // -(c + 1/2) in the stable regime and 0 otherwise.
  const AnchoredIntegral& edge(int sign) const;
  double edge_lead() const { return edge_lead_; }

  // Central band, band coordinates (sheared s in the stable regime).
  InnerPotential inner(double s, double lambda) const;
  // g and grad g of band `band` extended to x (no classification).
  PotentialSample in_band(int band, const Point& x) const;
  PotentialSample at(const Point& x) const;

 private:
  std::size_t slot(int i) const;

  int n_;
  double t_;
  Regime regime_;
  SpeedFamily speeds_;
  Grid grid_;
  CurveSlice z_;
  ShearMap shear_map_;
  Vector dz_dt_;
  std::vector<Vector> u_;
  std::vector<Vector> h_;
  std::vector<std::optional<AnchoredIntegral>> bands_;
  std::array<std::optional<AnchoredIntegral>, 2> edges_;
  double edge_lead_ = 0.0;
};

InnerPotential g_hat_unstable(const GFamily& family, double s, double lambda);
InnerPotential g_hat_stable(const GFamily& family, double s, double lambda);
// Unstable staircase family; N = 1 is the single-band construction.
GFamily g_family_multi(const InterfaceJet& jet, double t, const PVConfig& cfg = {});

// Direct sum (1/(1-(i/N)^2)) sum_{j>i} (c_j/N - (2j-1)/(2N^2) +- (dz/dt - u^(+-j))/N)
// for d/dx1 g^(+-i), 1 <= |i| <= N.
Vector telescoped_band_rate(const GFamily& family, int i);
// Its leading term without the velocity corrections.
double leading_band_rate(const SpeedFamily& speeds, int i);
// max over bands and nodes of |band_rate - telescoped_band_rate|.
double telescoped_identity_error(const GFamily& family);

// rho u - (1 - rho^2)(gamma + e2/2), gamma = (-dg/dx2, dg/dx1).
Point m_field(double rho, const Point& u, const Point& grad_g);
// (1 - rho^2)/2 - |m - rho u + (0, (1 - rho^2)/2)|.
double constraint_margin(double rho, const Point& u, const Point& m);

// [rho](dz/dt + c_i - u_nu) + [(1 - rho^2)(d_tau g + 1/2)] across interface i
// at every node, with d_tau g from differences of the one-sided potentials.
Vector jump_residual(const GFamily& family, int i);

struct AdmissibilityReport {
  double t = 0.0;
  // Bands -(N-1)..N-1 in order.
  std::vector<double> band_sup_grad;
  double sup_grad = 0.0;
  double margin = 0.0;  // 1/2 - sup_grad
  // sup |d ghat/d lambda| (= |dg/dx2| when unstable).
  double sup_normal = 0.0;
  // Unstable: sup |dg/dx1 - leading rate|; stable: sup |d ghat/ds + c + 1/2|.
  double sup_tangent_deviation = 0.0;
  bool admissible() const { return margin > 0.0; }
};

// Samples the central band at `levels` offsets per node and every other band at the nodes.
AdmissibilityReport admissibility_report(const GFamily& family, int levels = 5);

struct TStarResult {
  double t_star = 0.0;
  // False when no failure was found below t_hi (t_star = t_hi is a lower bound).
  bool bracketed = false;
  std::vector<std::pair<double, double>> margins;  // (t, margin) evaluated
};

// Doubling scan from t_lo until the margin fails, then bisection in log t.
TStarResult find_t_star(const InterfaceJet& jet, double t_lo, double t_hi, const Grid& grid,
                        const PVConfig& cfg = {}, double rel_tol = 1e-3);

// (1 - y^2)^8 per coordinate on the box centre +- radius, t_centre +- t_radius.
struct BumpTestFunction {
  Point centre;
  Point radius;
  double t_centre;
  double t_radius;

  double value(const Point& x, double t) const;
  // (d/dx1, d/dx2, d/dt).
  Eigen::Vector3d gradient(const Point& x, double t) const;
};

struct WeakResidualConfig {
  // Gauss-Legendre panels (8 nodes) per coordinate and per band.
  int panels = 2;
  // Spacing of the potential tables.
  double table_spacing = 0.05;
  WeakResidualConfig refined() const { return {2 * panels, 0.5 * table_spacing}; }
};

// |int int rho d_t phi + m . grad phi dx dt|, band by band in (s, lambda, t).
double weak_residual(const InterfaceJet& jet, const BumpTestFunction& phi, const WeakResidualConfig& wcfg = {},
                     const PVConfig& cfg = {});

struct SnapshotNode {
  Point x;
  RegionLabel region;
  double rho = 0.0;
  Point u = Point::Zero();
  Point m = Point::Zero();
  double g = 0.0;
  Point grad_g = Point::Zero();
  double margin = 0.0;
};

struct SubsolutionSnapshot {
  double t = 0.0;
  Eigen::Index nx = 0;
  Eigen::Index ny = 0;
  std::vector<SnapshotNode> nodes;  // row-major, x1 fastest
};

// Cartesian field dump on [x1 range] x [x2 range]. At t = 0 only rho and u
// are filled (the bands are empty). u is NaN at nodes lying on an interface.
SubsolutionSnapshot cartesian_snapshot(const InterfaceJet& jet, double t, std::array<double, 2> x1_range,
                                       std::array<double, 2> x2_range, Eigen::Index nx, Eigen::Index ny,
                                       const PVConfig& cfg = {});

}  // namespace muskat
