#include "muskat/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace muskat {

std::string to_string(Regime r) { return r == Regime::unstable ? "unstable" : "stable"; }

Regime regime_from_string(const std::string& name) {
  if (name == "unstable") return Regime::unstable;
  if (name == "stable") return Regime::stable;
  throw std::invalid_argument("regime must be 'stable' or 'unstable', got '" + name + "'");
}

SpeedFamily::SpeedFamily(std::vector<double> speeds) : speeds_(std::move(speeds)) {
  if (speeds_.empty()) throw std::invalid_argument("SpeedFamily: need at least one speed");
  if (!(speeds_.front() > 0.0)) throw std::invalid_argument("SpeedFamily: speeds must be positive");
  for (std::size_t i = 1; i < speeds_.size(); ++i)
    if (!(speeds_[i] > speeds_[i - 1])) throw std::invalid_argument("SpeedFamily: speeds must be strictly increasing");
}

SpeedFamily SpeedFamily::near_max(int n, double eps) {
  if (n < 1) throw std::invalid_argument("SpeedFamily: need at least one speed");
  std::vector<double> c(n);
  for (int i = 1; i <= n; ++i) c[i - 1] = (2.0 * i - 1.0) / n - eps;
  return SpeedFamily(std::move(c));
}

double SpeedFamily::speed(int i) const {
  if (i == 0 || std::abs(i) > size()) throw std::out_of_range("SpeedFamily: index out of range");
  return i > 0 ? speeds_[i - 1] : -speeds_[-i - 1];
}

std::vector<int> SpeedFamily::bound_violations() const {
  std::vector<int> out;
  const int n = size();
  for (int i = 1; i <= n; ++i)
    if (speeds_[i - 1] >= (2.0 * i - 1.0) / n) out.push_back(i);
  return out;
}

double sigma(const Curve& z0, double s) {
  const double a = z0.eval(s, 1);
  const double q = 1.0 + a * a;
  return (1.0 - a * a) / (q * q);
}

double cbar(const SpeedFamily& speeds) {
  const auto& c = speeds.values();
  double sum = 0.0;
  for (double ci : c)
    for (double cj : c) sum += std::max(ci, cj);
  const double n = static_cast<double>(c.size());
  return sum / (n * n);
}

double c_max(Regime regime, double beta, double slope_norm) {
  if (regime == Regime::unstable) return 1.0;
  const double b = std::abs(beta);
  if (!(slope_norm < b)) throw std::invalid_argument("c_max: stable regime needs sup|dzbar/ds| < |beta|");
  return 0.5 * b * (b - slope_norm) / (1.0 + b * slope_norm);
}

double InterfaceJet::dz_dt(double s, double t) const { return (*z1)(s, 0) + t * (*z2)(s, 0); }

double InterfaceJet::z_at(double s, double t, int j) const {
  if (j < 0 || j > 2) throw std::out_of_range("z_at: derivative order must be 0..2");
  return slice(t).eval(s, j);
}

InterfaceJet build_jet(const Curve& z0, const SpeedFamily& speeds, Regime regime, const Grid& grid,
                       const PVConfig& cfg) {
  const double sign = regime_sign(regime);
  const double rate = cbar(speeds);
  if (z0.has_zero_perturbation()) {
    auto zero = std::make_shared<const SampledFunction>(SampledFunction::zero(grid));
    return {z0, zero, zero, grid, speeds, regime, rate};
  }
  const Weight base = phi0(z0);
  auto z1 = std::make_shared<const SampledFunction>(grid, Vector(sign * transform_grid(z0.perturbation_field(), base, grid, cfg)));

  const Weight first_order = phi1(z0, z1->field());
  Vector v2 = transform_grid(z1->field(), base, grid, cfg) + transform_grid(z0.perturbation_field(), first_order, grid, cfg);
  for (Eigen::Index i = 0; i < grid.size(); ++i) v2[i] += rate * sigma(z0, grid[i]) * z0.eval(grid[i], 2);
  auto z2 = std::make_shared<const SampledFunction>(grid, Vector(sign * v2));
  return {z0, z1, z2, grid, speeds, regime, rate};
}

double symmetric_line_integral(const std::function<double(double)>& g, double reach, double tol) {
  auto both = [&g](double x) { return g(x) + g(-x); };
  const double edge = std::ceil(std::abs(reach)) + 8.0;
  double sum = integrate_adaptive(both, 0.0, 0.5, tol) + integrate_adaptive(both, 0.5, 1.0, tol);
  for (double a = 1.0; a < edge; a += 1.0) sum += integrate_adaptive(both, a, a + 1.0, tol);
  return sum + integrate_adaptive(both, edge, std::numeric_limits<double>::infinity(), tol);
}

double muskat_rhs(const Curve& z0, double s, Regime regime, double tol) {
  const double zs = z0.eval(s, 0);
  const double slope = z0.eval(s, 1);
  auto kernel = [&](double tau) {
    const double rise = zs - z0.eval(s - tau, 0);
    return (slope - z0.eval(s - tau, 1)) * tau / (tau * tau + rise * rise);
  };
  // (rho_minus - rho_plus)/(2 pi) = -sign/pi.
  return -regime_sign(regime) / std::numbers::pi * symmetric_line_integral(kernel, s, tol);
}

Weight averaged_pair_weight(const CurveSlice& z, const SpeedFamily& speeds, int i, double t) {
  const int n = speeds.size();
  const double ci = speeds.speed(i);
  std::vector<ShiftedTerm> terms;
  for (int j = 1; j <= n; ++j) {
    const double cj = speeds.speed(j);
    terms.push_back({1.0 / n, (ci - cj) * t});
    terms.push_back({1.0 / n, (ci + cj) * t});
  }
  return shifted_quotient_kernel(z, std::move(terms));
}

double normal_velocity(const InterfaceJet& jet, int i, double t, double s, const PVConfig& cfg) {
  if (i == 0) throw std::invalid_argument("normal_velocity: interface index must be nonzero");
  if (t < 0.0) throw std::invalid_argument("normal_velocity: t must be non-negative");
  const CurveSlice z = jet.slice(t);
  return regime_sign(jet.regime) * transform(z.perturbation_field(), averaged_pair_weight(z, jet.speeds, i, t), s, cfg);
}

Vector normal_velocity_grid(const InterfaceJet& jet, int i, double t, const PVConfig& cfg) {
  return normal_velocity_grid(jet, i, t, jet.grid, cfg);
}

Vector normal_velocity_grid(const InterfaceJet& jet, int i, double t, const Grid& grid, const PVConfig& cfg) {
  if (i == 0) throw std::invalid_argument("normal_velocity: interface index must be nonzero");
  if (t < 0.0) throw std::invalid_argument("normal_velocity: t must be non-negative");
  const CurveSlice z = jet.slice(t);
  return regime_sign(jet.regime) *
         transform_grid(z.perturbation_field(), averaged_pair_weight(z, jet.speeds, i, t), grid, cfg);
}

}  // namespace muskat
