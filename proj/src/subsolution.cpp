#include "muskat/subsolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace muskat {

namespace {

// 1 - (i/N)^2
double band_weight(int i, int n) {
  const double r = static_cast<double>(i) / n;
  return 1.0 - r * r;
}

// c_j/N - (2j-1)/(2N^2)
double rate_increment(const SpeedFamily& speeds, int j) {
  const double n = speeds.size();
  return speeds.speed(j) / n - (2.0 * j - 1.0) / (2.0 * n * n);
}

struct Node {
  double x;
  double w;
};

std::vector<Node> composite_gauss(double a, double b, int panels) {
  const QuadratureRule& rule = gauss_legendre(8);
  std::vector<Node> out;
  out.reserve(8 * panels);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k)
      out.push_back({mid + 0.5 * width * rule.nodes[k], 0.5 * width * rule.weights[k]});
  }
  return out;
}

// Offsets of the lower and upper edge of band j at time t.
std::pair<double, double> band_edges(const SpeedFamily& speeds, int j, double t) {
  const int n = speeds.size();
  const double inf = std::numeric_limits<double>::infinity();
  auto offset = [&](int i) { return speeds.speed(i) * t; };
  if (j == 0) return {-offset(1), offset(1)};
  if (j == n) return {offset(n), inf};
  if (j == -n) return {-inf, -offset(n)};
  if (j > 0) return {offset(j), offset(j + 1)};
  return {-offset(-j + 1), -offset(-j)};
}

double bump_profile(double y) {
  if (std::abs(y) >= 1.0) return 0.0;
  const double q = 1.0 - y * y;
  const double q2 = q * q;
  const double q4 = q2 * q2;
  return q4 * q4;
}

double bump_slope(double y) {
  if (std::abs(y) >= 1.0) return 0.0;
  const double q = 1.0 - y * y;
  const double q2 = q * q;
  return -16.0 * y * q2 * q2 * q2 * q;
}

}  // namespace

RegionLabel classify_offset(double lambda, double t, const SpeedFamily& speeds) {
  const int n = speeds.size();
  if (t <= 0.0) return {lambda >= 0.0 ? n : -n, lambda == 0.0};
  const double e1 = speeds.speed(1) * t;
  if (lambda >= e1) {
    int i = 1;
    while (i < n && lambda >= speeds.speed(i + 1) * t) ++i;
    return {i, lambda == speeds.speed(i) * t};
  }
  if (lambda >= -e1) return {0, lambda == -e1};
  int i = 1;
  while (i < n && lambda < -speeds.speed(i + 1) * t) ++i;
  return {-i, i < n && lambda == -speeds.speed(i + 1) * t};
}

RegionLabel classify(const Point& x, double t, const InterfaceJet& jet) {
  return classify_offset(x[1] - jet.z_at(x[0], t), t, jet.speeds);
}

double density(const RegionLabel& label, int n, Regime regime) {
  if (std::abs(label.index) > n) throw std::out_of_range("density: region index beyond the outer phase");
  return regime_sign(regime) * static_cast<double>(label.index) / n;
}

Point full_velocity(const Point& x, double t, const InterfaceJet& jet, const PVConfig& cfg) {
  const CurveSlice z = jet.slice(t);
  const int n = jet.speeds.size();
  const double jump = regime_sign(jet.regime) / n;
  const double x1 = x[0];
  const double x2 = x[1];
  const double base = z.eval(x1);
  Point u = Point::Zero();
  for (int k = -n; k <= n; ++k) {
    if (k == 0) continue;
    const double offset = jet.speeds.speed(k) * t;
    if (x2 - base - offset == 0.0) throw std::domain_error("full_velocity: point lies on an interface");
    auto horizontal = [&](double tau) {
      const double rise = z.eval(x1 - tau) + offset - x2;
      return tau / (tau * tau + rise * rise);
    };
    auto vertical = [&](double tau) {
      const double rise = z.eval(x1 - tau) + offset - x2;
      return z.eval(x1 - tau, 1) * tau / (tau * tau + rise * rise);
    };
    u[0] += line_integral(horizontal, cfg, x1);
    u[1] += line_integral(vertical, cfg, x1);
  }
  return jump * u;
}

AnchoredIntegral::AnchoredIntegral(Grid grid, Vector rates)
    : grid_(grid), rates_(std::move(rates)), cumulative_(Vector::Zero(grid.size())) {
  if (rates_.size() != grid_.size()) throw std::invalid_argument("AnchoredIntegral: size mismatch");
  if (grid_.size() < 3) throw std::invalid_argument("AnchoredIntegral: need at least 3 nodes");
  const double h = grid_.spacing();
  for (Eigen::Index k = 1; k < grid_.size(); ++k)
    cumulative_[k] = cumulative_[k - 1] + 0.5 * h * (rates_[k - 1] + rates_[k]);
  anchor_ = cumulative(0.0);
}

double AnchoredIntegral::rate(double s) const {
  const Eigen::Index last = grid_.size() - 1;
  if (s <= grid_.s_min()) return rates_[0];
  if (s >= grid_.s_max()) return rates_[last];
  const double h = grid_.spacing();
  const Eigen::Index j = std::min<Eigen::Index>(static_cast<Eigen::Index>((s - grid_.s_min()) / h), last - 1);
  const double x = (s - grid_[j]) / h;
  return (1.0 - x) * rates_[j] + x * rates_[j + 1];
}

double AnchoredIntegral::cumulative(double s) const {
  const Eigen::Index last = grid_.size() - 1;
  if (s <= grid_.s_min()) return (s - grid_.s_min()) * rates_[0];
  if (s >= grid_.s_max()) return cumulative_[last] + (s - grid_.s_max()) * rates_[last];
  const double h = grid_.spacing();
  const Eigen::Index j = std::min<Eigen::Index>(static_cast<Eigen::Index>((s - grid_.s_min()) / h), last - 1);
  const double x = s - grid_[j];
  return cumulative_[j] + x * rates_[j] + 0.5 * x * x / h * (rates_[j + 1] - rates_[j]);
}

double AnchoredIntegral::value(double s) const { return cumulative(s) - anchor_; }

double AnchoredIntegral::difference_rate(Eigen::Index k) const {
  const Eigen::Index last = grid_.size() - 1;
  const double h = grid_.spacing();
  const Vector& g = cumulative_;
  if (k == 0) return (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
  if (k == last) return (3.0 * g[last] - 4.0 * g[last - 1] + g[last - 2]) / (2.0 * h);
  return (g[k + 1] - g[k - 1]) / (2.0 * h);
}

Point ShearMap::forward(double s, double lambda) const {
  const double x1 = s - shear_ * lambda;
  return {x1, z_.eval(x1) + lambda};
}

Point ShearMap::inverse(const Point& x) const {
  const double lambda = x[1] - z_.eval(x[0]);
  return {x[0] + shear_ * lambda, lambda};
}

Eigen::Matrix2d ShearMap::inverse_jacobian_transpose(const Point& x) const {
  const double slope = z_.eval(x[0], 1);
  Eigen::Matrix2d m;
  m << 1.0 - shear_ * slope, -slope, shear_, 1.0;
  return m;
}

GFamily::GFamily(const InterfaceJet& jet, double t, const Grid& grid, const PVConfig& cfg)
    : n_(jet.speeds.size()),
      t_(t),
      regime_(jet.regime),
      speeds_(jet.speeds),
      grid_(grid),
      z_(jet.slice(t)),
      shear_map_(z_, 0.0) {
  if (!(t > 0.0)) throw std::invalid_argument("GFamily: t must be positive");
  if (regime_ == Regime::stable) {
    if (n_ > 1) throw std::invalid_argument("GFamily: staircase densities are built in the unstable regime only");
    const double beta = z_.beta();
    if (beta == 0.0) throw std::invalid_argument("GFamily: the stable construction needs beta != 0");
    shear_map_ = ShearMap(z_, beta / (1.0 + beta * beta));
  }
  const Eigen::Index m = grid_.size();
  dz_dt_.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) dz_dt_[k] = jet.dz_dt(grid_[k], t);

  const std::size_t slots = 2 * static_cast<std::size_t>(n_) + 1;
  u_.assign(slots, Vector());
  h_.assign(slots, Vector());
  bands_.assign(slots, std::nullopt);
  for (int i = -n_; i <= n_; ++i)
    if (i != 0) u_[slot(i)] = normal_velocity_grid(jet, i, t, grid_, cfg);

  for (int sgn : {1, -1}) {
    if (regime_ == Regime::stable) {
      const double c = speeds_.speed(1);
      edge_lead_ = -(c + 0.5);
      const Vector correction = -sgn * (dz_dt_ - u_[slot(sgn)]);
      h_[slot(sgn)] = Vector::Constant(m, edge_lead_) + correction;
      // Only the correction is read at the sheared foot point.
      edges_[sgn > 0] = AnchoredIntegral(grid_, correction);
      continue;
    }
    for (int i = 1; i <= n_; ++i) {
      const Vector excess = dz_dt_ - u_[slot(sgn * i)];
      h_[slot(sgn * i)] =
          (Vector::Constant(m, rate_increment(speeds_, i)) + (sgn / static_cast<double>(n_)) * excess) /
          band_weight(i - 1, n_);
    }
    Vector rate = Vector::Zero(m);
    for (int i = n_ - 1; i >= 1; --i) {
      rate = h_[slot(sgn * (i + 1))] + (band_weight(i + 1, n_) / band_weight(i, n_)) * rate;
      bands_[slot(sgn * i)] = AnchoredIntegral(grid_, rate);
    }
    edges_[sgn > 0] = AnchoredIntegral(grid_, Vector(h_[slot(sgn)] + band_weight(1, n_) * rate));
  }
}

std::size_t GFamily::slot(int i) const {
  if (std::abs(i) > n_) throw std::out_of_range("GFamily: band index out of range");
  return static_cast<std::size_t>(i + n_);
}

const Vector& GFamily::normal_velocity(int i) const {
  if (i == 0) throw std::invalid_argument("GFamily: interface index must be nonzero");
  return u_[slot(i)];
}

const Vector& GFamily::h(int i) const {
  if (i == 0) throw std::invalid_argument("GFamily: interface index must be nonzero");
  return h_[slot(i)];
}

Vector GFamily::band_rate(int i) const {
  if (i == 0) throw std::invalid_argument("GFamily: band rate needs 1 <= |i| <= N");
  if (std::abs(i) == n_) return Vector::Zero(grid_.size());
  return band(i).rates();
}

const AnchoredIntegral& GFamily::band(int i) const {
  if (i == 0 || std::abs(i) >= n_) throw std::out_of_range("GFamily: band potentials exist for 1 <= |i| <= N-1");
  return *bands_[slot(i)];
}

const AnchoredIntegral& GFamily::edge(int sign) const {
  if (sign != 1 && sign != -1) throw std::invalid_argument("GFamily: edge sign must be +1 or -1");
  return *edges_[sign > 0];
}

InnerPotential GFamily::inner(double s, double lambda) const {
  const double width = speeds_.speed(1) * t_;
  const double b = shear_map_.shear();
  const double up = (width + lambda) / (2.0 * width);
  const double down = (width - lambda) / (2.0 * width);
  const AnchoredIntegral& top = *edges_[1];
  const AnchoredIntegral& bottom = *edges_[0];
  const double g_top = top.value(s - b * width);
  const double g_bottom = bottom.value(s + b * width);

  InnerPotential out;
  out.g = edge_lead_ * s + up * g_top + down * g_bottom;
  out.dg_ds = edge_lead_ + up * top.rate(s - b * width) + down * bottom.rate(s + b * width);
  out.dg_dlambda = (g_top - g_bottom) / (2.0 * width);
  const Point x = shear_map_.forward(s, lambda);
  out.grad = shear_map_.inverse_jacobian_transpose(x) * Point(out.dg_ds, out.dg_dlambda);
  return out;
}

PotentialSample GFamily::in_band(int band_index, const Point& x) const {
  if (std::abs(band_index) > n_) throw std::out_of_range("GFamily: band index out of range");
  if (band_index == 0) {
    const Point p = shear_map_.inverse(x);
    const InnerPotential ip = inner(p[0], p[1]);
    return {ip.g, ip.grad};
  }
  if (std::abs(band_index) == n_) return {};
  const AnchoredIntegral& a = band(band_index);
  return {a.value(x[0]), Point(a.rate(x[0]), 0.0)};
}

PotentialSample GFamily::at(const Point& x) const {
  return in_band(classify_offset(x[1] - z_.eval(x[0]), t_, speeds_).index, x);
}

namespace {

void check_inner_offset(const GFamily& family, double lambda) {
  const double width = family.speeds().speed(1) * family.t();
  if (std::abs(lambda) > width) throw std::domain_error("ghat: |lambda| exceeds c t");
}

}  // namespace

InnerPotential g_hat_unstable(const GFamily& family, double s, double lambda) {
  if (family.regime() != Regime::unstable) throw std::invalid_argument("g_hat_unstable: family is stable");
  check_inner_offset(family, lambda);
  return family.inner(s, lambda);
}

InnerPotential g_hat_stable(const GFamily& family, double s, double lambda) {
  if (family.regime() != Regime::stable) throw std::invalid_argument("g_hat_stable: family is unstable");
  check_inner_offset(family, lambda);
  return family.inner(s, lambda);
}

GFamily g_family_multi(const InterfaceJet& jet, double t, const PVConfig& cfg) {
  if (jet.regime != Regime::unstable) throw std::invalid_argument("g_family_multi: unstable regime only");
  return GFamily(jet, t, cfg);
}

namespace {

// (1/(1-(a/N)^2)) sum_{j=a+1}^N (c_j/N - (2j-1)/(2N^2) + sgn (dz/dt - u^(sgn j))/N)
Vector telescoped_sum(const GFamily& family, int sgn, int a) {
  const int n = family.count();
  Vector sum = Vector::Zero(family.grid().size());
  for (int j = a + 1; j <= n; ++j)
    sum += Vector::Constant(sum.size(), rate_increment(family.speeds(), j)) +
           (sgn / static_cast<double>(n)) * (family.dz_dt() - family.normal_velocity(sgn * j));
  return sum / band_weight(a, n);
}

}  // namespace

Vector telescoped_band_rate(const GFamily& family, int i) {
  if (family.regime() != Regime::unstable) throw std::invalid_argument("telescoped_band_rate: unstable regime only");
  if (i == 0 || std::abs(i) > family.count()) throw std::out_of_range("telescoped_band_rate: need 1 <= |i| <= N");
  return telescoped_sum(family, i > 0 ? 1 : -1, std::abs(i));
}

double leading_band_rate(const SpeedFamily& speeds, int i) {
  const int n = speeds.size();
  const int a = std::abs(i);
  if (a > n) throw std::out_of_range("leading_band_rate: need |i| <= N");
  double sum = 0.0;
  for (int j = a + 1; j <= n; ++j) sum += rate_increment(speeds, j);
  return a == n ? 0.0 : sum / band_weight(a, n);
}

double telescoped_identity_error(const GFamily& family) {
  double worst = 0.0;
  for (int sgn : {1, -1}) {
    for (int a = 1; a < family.count(); ++a)
      worst = std::max(worst, (family.band_rate(sgn * a) - telescoped_sum(family, sgn, a)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (family.edge(sgn).rates() - telescoped_sum(family, sgn, 0)).cwiseAbs().maxCoeff());
  }
  return worst;
}

Point m_field(double rho, const Point& u, const Point& grad_g) {
  if (std::abs(rho) > 1.0) throw std::invalid_argument("m_field: |rho| must not exceed 1");
  const double mix = 1.0 - rho * rho;
  const Point gamma(-grad_g[1], grad_g[0]);
  return rho * u - mix * (gamma + Point(0.0, 0.5));
}

double constraint_margin(double rho, const Point& u, const Point& m) {
  const double mix = 1.0 - rho * rho;
  return 0.5 * mix - (m - rho * u + Point(0.0, 0.5 * mix)).norm();
}

Vector jump_residual(const GFamily& family, int i) {
  const int n = family.count();
  if (i == 0 || std::abs(i) > n) throw std::out_of_range("jump_residual: need 1 <= |i| <= N");
  const int above = i > 0 ? i : i + 1;
  const int below = i > 0 ? i - 1 : i;
  const double rho_above = density({above}, n, family.regime());
  const double rho_below = density({below}, n, family.regime());
  const double speed = family.speeds().speed(i);

  auto trace = [&](int band, Eigen::Index k) {
    if (band == 0) return family.edge_lead() + family.edge(i > 0 ? 1 : -1).difference_rate(k);
    if (std::abs(band) == n) return 0.0;
    return family.band(band).difference_rate(k);
  };
  const Vector& u = family.normal_velocity(i);
  Vector out(family.grid().size());
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    out[k] = (rho_above - rho_below) * (family.dz_dt()[k] + speed - u[k]) +
             (1.0 - rho_above * rho_above) * (trace(above, k) + 0.5) -
             (1.0 - rho_below * rho_below) * (trace(below, k) + 0.5);
  }
  return out;
}

AdmissibilityReport admissibility_report(const GFamily& family, int levels) {
  if (levels < 2) throw std::invalid_argument("admissibility_report: need at least 2 offset levels");
  const int n = family.count();
  const Grid& grid = family.grid();
  const double width = family.speeds().speed(1) * family.t();
  const bool stable = family.regime() == Regime::stable;
  const double inner_lead = stable ? -(family.speeds().speed(1) + 0.5) : leading_band_rate(family.speeds(), 0);

  AdmissibilityReport r;
  r.t = family.t();
  r.band_sup_grad.assign(2 * n - 1, 0.0);
  double& inner_sup = r.band_sup_grad[n - 1];
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    for (int l = 0; l < levels; ++l) {
      const double lambda = -width + 2.0 * width * l / (levels - 1);
      const InnerPotential p = family.inner(grid[k], lambda);
      inner_sup = std::max(inner_sup, p.grad.norm());
      r.sup_normal = std::max(r.sup_normal, std::abs(p.dg_dlambda));
      const double deviation = stable ? std::abs(p.dg_ds - inner_lead) : std::abs(p.grad[0] - inner_lead);
      r.sup_tangent_deviation = std::max(r.sup_tangent_deviation, deviation);
    }
  for (int j = 1; j < n; ++j)
    for (int sgn : {1, -1}) {
      const Vector rate = family.band_rate(sgn * j);
      r.band_sup_grad[n - 1 + sgn * j] = rate.cwiseAbs().maxCoeff();
      const double lead = leading_band_rate(family.speeds(), j);
      r.sup_tangent_deviation = std::max(r.sup_tangent_deviation, (rate.array() - lead).abs().maxCoeff());
    }
  r.sup_grad = *std::max_element(r.band_sup_grad.begin(), r.band_sup_grad.end());
  r.margin = 0.5 - r.sup_grad;
  return r;
}

TStarResult find_t_star(const InterfaceJet& jet, double t_lo, double t_hi, const Grid& grid, const PVConfig& cfg,
                        double rel_tol) {
  if (!(t_lo > 0.0) || !(t_hi >= t_lo)) throw std::invalid_argument("find_t_star: need 0 < t_lo <= t_hi");
  TStarResult out;
  auto margin = [&](double t) {
    const double m = admissibility_report(GFamily(jet, t, grid, cfg)).margin;
    out.margins.emplace_back(t, m);
    return m;
  };
  if (margin(t_lo) <= 0.0) {
    out.bracketed = true;
    return out;
  }
  double pass = t_lo;
  double fail = 0.0;
  while (pass < t_hi) {
    const double next = std::min(2.0 * pass, t_hi);
    if (margin(next) > 0.0) {
      pass = next;
    } else {
      fail = next;
      break;
    }
  }
  if (fail == 0.0) {
    out.t_star = t_hi;
    return out;
  }
  while (fail / pass > 1.0 + rel_tol) {
    const double mid = std::sqrt(pass * fail);
    (margin(mid) > 0.0 ? pass : fail) = mid;
  }
  out.t_star = pass;
  out.bracketed = true;
  return out;
}

double BumpTestFunction::value(const Point& x, double t) const {
  return bump_profile((x[0] - centre[0]) / radius[0]) * bump_profile((x[1] - centre[1]) / radius[1]) *
         bump_profile((t - t_centre) / t_radius);
}

Eigen::Vector3d BumpTestFunction::gradient(const Point& x, double t) const {
  const double y1 = (x[0] - centre[0]) / radius[0];
  const double y2 = (x[1] - centre[1]) / radius[1];
  const double y3 = (t - t_centre) / t_radius;
  const double p1 = bump_profile(y1), p2 = bump_profile(y2), p3 = bump_profile(y3);
  return {bump_slope(y1) / radius[0] * p2 * p3, p1 * bump_slope(y2) / radius[1] * p3,
          p1 * p2 * bump_slope(y3) / t_radius};
}

double weak_residual(const InterfaceJet& jet, const BumpTestFunction& phi, const WeakResidualConfig& wcfg,
                     const PVConfig& cfg) {
  if (wcfg.panels < 1 || !(wcfg.table_spacing > 0.0)) throw std::invalid_argument("weak_residual: bad resolution");
  if (!(phi.t_centre - phi.t_radius > 0.0)) throw std::domain_error("weak_residual: time support must lie in t > 0");
  const double h = wcfg.table_spacing;
  const double reach = std::max(std::abs(phi.centre[0] - phi.radius[0]), std::abs(phi.centre[0] + phi.radius[0]));
  const auto intervals = static_cast<Eigen::Index>(std::ceil((reach + 2.0 * h) / h));
  const Grid table(intervals * h, 2 * intervals + 1);
  if (table.s_max() > jet.grid.s_max()) throw std::domain_error("weak_residual: test function leaves the grid box");

  const int n = jet.speeds.size();
  const std::vector<Node> times =
      composite_gauss(phi.t_centre - phi.t_radius, phi.t_centre + phi.t_radius, wcfg.panels);
  const std::vector<Node> abscissae =
      composite_gauss(phi.centre[0] - phi.radius[0], phi.centre[0] + phi.radius[0], wcfg.panels);
  std::vector<double> per_time(times.size(), 0.0);

  parallel_for(times.size(), [&](std::size_t it) {
    const double t = times[it].x;
    const GFamily family(jet, t, table, cfg);
    const CurveSlice z = jet.slice(t);
    double sum = 0.0;
    for (const Node& sn : abscissae) {
      const double base = z.eval(sn.x);
      const double support_lo = phi.centre[1] - phi.radius[1] - base;
      const double support_hi = phi.centre[1] + phi.radius[1] - base;
      for (int band = -n; band <= n; ++band) {
        const auto [lower, upper] = band_edges(jet.speeds, band, t);
        const double lo = std::max(lower, support_lo);
        const double hi = std::min(upper, support_hi);
        if (!(hi > lo)) continue;
        const double rho = density({band}, n, jet.regime);
        for (const Node& ln : composite_gauss(lo, hi, wcfg.panels)) {
          const Point x(sn.x, base + ln.x);
          const Eigen::Vector3d dphi = phi.gradient(x, t);
          if (dphi.isZero(0.0)) continue;
          const Point u = rho == 0.0 ? Point::Zero() : full_velocity(x, t, jet, cfg);
          const Point m = m_field(rho, u, family.in_band(band, x).grad);
          sum += sn.w * ln.w * (rho * dphi[2] + m[0] * dphi[0] + m[1] * dphi[1]);
        }
      }
    }
    per_time[it] = times[it].w * sum;
  });
  double total = 0.0;
  for (double v : per_time) total += v;
  return std::abs(total);
}

SubsolutionSnapshot cartesian_snapshot(const InterfaceJet& jet, double t, std::array<double, 2> x1_range,
                                       std::array<double, 2> x2_range, Eigen::Index nx, Eigen::Index ny,
                                       const PVConfig& cfg) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("cartesian_snapshot: need at least 2 nodes per direction");
  if (t < 0.0) throw std::invalid_argument("cartesian_snapshot: t must be non-negative");
  std::optional<GFamily> family;
  if (t > 0.0) family.emplace(jet, t, cfg);
  const int n = jet.speeds.size();
  const CurveSlice z = jet.slice(t);

  SubsolutionSnapshot snap;
  snap.t = t;
  snap.nx = nx;
  snap.ny = ny;
  snap.nodes.resize(static_cast<std::size_t>(nx * ny));
  parallel_for(snap.nodes.size(), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx) % nx;
    const auto j = static_cast<Eigen::Index>(idx) / nx;
    SnapshotNode& node = snap.nodes[idx];
    node.x = {x1_range[0] + (x1_range[1] - x1_range[0]) * static_cast<double>(i) / (nx - 1),
              x2_range[0] + (x2_range[1] - x2_range[0]) * static_cast<double>(j) / (ny - 1)};
    node.region = classify_offset(node.x[1] - z.eval(node.x[0]), t, jet.speeds);
    node.rho = density(node.region, n, jet.regime);
    try {
      node.u = full_velocity(node.x, t, jet, cfg);
    } catch (const std::domain_error&) {
      node.u = Point::Constant(std::numeric_limits<double>::quiet_NaN());
    }
    if (family) {
      const PotentialSample p = family->in_band(node.region.index, node.x);
      node.g = p.g;
      node.grad_g = p.grad;
      node.m = m_field(node.rho, node.u, node.grad_g);
      node.margin = constraint_margin(node.rho, node.u, node.m);
    } else {
      node.m = node.rho * node.u;
    }
  });
  return snap;
}

}  // namespace muskat
