#include "muskat/pv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace muskat {

Weight::Weight(ColumnFactory columns, std::function<double(double)> phi_inf)
    : columns_(std::move(columns)), phi_inf_(std::move(phi_inf)) {
  if (!columns_ || !phi_inf_) throw std::invalid_argument("Weight: empty evaluator");
}

Weight Weight::constant(double value) {
  return Weight(
      [value](double) { return Column([value](double) { return WeightSample{value, 0.0, -value}; }); },
      [value](double) { return value; });
}

Weight Weight::from_phi(std::function<double(double, double)> phi, std::function<double(double)> phi_inf) {
  auto columns = [phi, phi_inf](double s) {
    const double inf = phi_inf(s);
    return Column([phi, s, inf](double xi) {
      const double value = phi(xi, s);
      const double step = 1e-4 * std::max(1.0, std::abs(xi));
      const double slope = (phi(xi + step, s) - phi(xi - step, s)) / (2.0 * step);
      return WeightSample{value, xi * (value - inf), xi * slope - value};
    });
  };
  return Weight(columns, phi_inf);
}

Weight operator+(const Weight& a, const Weight& b) {
  auto columns = [ca = a.columns_, cb = b.columns_](double s) {
    return Weight::Column([x = ca(s), y = cb(s)](double xi) {
      const WeightSample p = x(xi);
      const WeightSample q = y(xi);
      return WeightSample{p.phi + q.phi, p.bar + q.bar, p.tilde + q.tilde};
    });
  };
  return Weight(columns, [ia = a.phi_inf_, ib = b.phi_inf_](double s) { return ia(s) + ib(s); });
}

Weight operator*(double k, const Weight& w) {
  auto columns = [k, cw = w.columns_](double s) {
    return Weight::Column([k, x = cw(s)](double xi) {
      const WeightSample p = x(xi);
      return WeightSample{k * p.phi, k * p.bar, k * p.tilde};
    });
  };
  return Weight(columns, [k, iw = w.phi_inf_](double s) { return k * iw(s); });
}

void PVConfig::validate() const {
  if (inner_n < 64 || inner_n % 64 != 0)
    throw std::invalid_argument("PVConfig: inner_n must be a positive multiple of 64, got " + std::to_string(inner_n));
  if (!(outer_r >= 1e3)) throw std::invalid_argument("PVConfig: outer_r must be at least 1e3");
  if (outer_n < 8 || outer_n % 8 != 0)
    throw std::invalid_argument("PVConfig: outer_n must be a positive multiple of 8, got " + std::to_string(outer_n));
}

namespace {

constexpr int kInnerLevels = 32;
constexpr int kOuterPanelNodes = 8;

struct Node {
  double x;
  double w;
};

void append_panel(double lo, double hi, const QuadratureRule& rule, std::vector<Node>& out) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) out.push_back({mid + half * rule.nodes[k], half * rule.weights[k]});
}

// Positive half of the inner layout: [2^-(j+1), 2^-j] for j < 31 and [0, 2^-31].
const std::vector<Node>& inner_layout(int inner_n) {
  static std::mutex mutex;
  static std::map<int, std::vector<Node>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(inner_n); it != cache.end()) return it->second;
  const QuadratureRule& rule = gauss_legendre(inner_n / (2 * kInnerLevels));
  std::vector<Node> nodes;
  double hi = 1.0;
  for (int j = 0; j < kInnerLevels - 1; ++j) {
    append_panel(0.5 * hi, hi, rule, nodes);
    hi *= 0.5;
  }
  append_panel(0.0, hi, rule, nodes);
  return cache.emplace(inner_n, std::move(nodes)).first->second;
}

// One side of 1 < x < R. Panels grow geometrically with x and shrink again
// toward `centre`, where the shifted density f(s - xi) is concentrated.
void outer_layout(double centre, const PVConfig& cfg, std::vector<Node>& out) {
  const QuadratureRule& rule = gauss_legendre(kOuterPanelNodes);
  const double ratio = std::pow(10.0, static_cast<double>(kOuterPanelNodes) / cfg.outer_n) - 1.0;
  double x = 1.0;
  while (x < cfg.outer_r) {
    const double scale = std::max(1.0, std::min(x, std::abs(x - centre)));
    const double next = std::min(cfg.outer_r, x + ratio * scale);
    append_panel(x, next, rule, out);
    x = next;
  }
}

thread_local std::vector<Node> outer_scratch;

}  // namespace

std::vector<double> inner_nodes(const PVConfig& cfg) {
  cfg.validate();
  std::vector<double> out;
  for (const Node& n : inner_layout(cfg.inner_n)) {
    out.push_back(n.x);
    out.push_back(-n.x);
  }
  return out;
}

std::vector<double> outer_nodes(double s, const PVConfig& cfg) {
  cfg.validate();
  std::vector<double> out;
  for (double side : {1.0, -1.0}) {
    outer_scratch.clear();
    outer_layout(side * s, cfg, outer_scratch);
    for (const Node& n : outer_scratch) out.push_back(side * n.x);
  }
  return out;
}

TransformParts transform_parts(const ScalarField& f, const Weight& weight, double s, const PVConfig& cfg) {
  cfg.validate();
  const Weight::Column column = weight.column(s);
  const double slope = f(s, 1);
  const double R = cfg.outer_r;

  double near = 0.0;
  for (const Node& n : inner_layout(cfg.inner_n)) {
    for (double xi : {n.x, -n.x}) near += n.w * (f(s - xi, 1) - slope) / xi * column(xi).phi;
  }

  double mean = 0.0;
  double far = 0.0;
  for (double side : {1.0, -1.0}) {
    outer_scratch.clear();
    outer_layout(side * s, cfg, outer_scratch);
    for (const Node& n : outer_scratch) {
      const double xi = side * n.x;
      const WeightSample w = column(xi);
      const double inv = 1.0 / (xi * xi);
      mean += n.w * w.bar * inv;
      far += n.w * f(s - xi, 0) * w.tilde * inv;
    }
    // Beyond R the integrands behave like K/xi^2, whose tail is K/R.
    const double xi = side * R;
    const WeightSample w = column(xi);
    const double expected = xi * (w.phi - weight.phi_inf(s));
    if (std::abs(expected - w.bar) > 1e-6 * (1.0 + std::abs(w.bar)))
      throw std::domain_error("transform: weight far-field data inconsistent at s = " + std::to_string(s));
    mean += w.bar / R;
    far += f(s - xi, 0) * w.tilde / R;
  }

  const double boundary = f(s - 1.0, 0) * column(1.0).phi + f(s + 1.0, 0) * column(-1.0).phi;

  constexpr double inv2pi = 0.5 / std::numbers::pi;
  TransformParts parts{near * inv2pi, -slope * mean * inv2pi, boundary * inv2pi, far * inv2pi};
  if (!std::isfinite(parts.total()))
    throw std::domain_error("transform: non-finite integrand sample at s = " + std::to_string(s));
  return parts;
}

double transform(const ScalarField& f, const Weight& weight, double s, const PVConfig& cfg) {
  return transform_parts(f, weight, s, cfg).total();
}

Vector transform_grid(const ScalarField& f, const Weight& weight, const Grid& grid, const PVConfig& cfg) {
  cfg.validate();
  Vector out(grid.size());
  parallel_for(static_cast<std::size_t>(grid.size()), [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[k] = transform(f, weight, grid[k], cfg);
  });
  return out;
}

double line_integral(const std::function<double(double)>& g, const PVConfig& cfg, double centre) {
  cfg.validate();
  double sum = 0.0;
  for (const Node& n : inner_layout(cfg.inner_n)) sum += n.w * (g(n.x) + g(-n.x));
  for (double side : {1.0, -1.0}) {
    outer_scratch.clear();
    outer_layout(side * centre, cfg, outer_scratch);
    for (const Node& n : outer_scratch) sum += n.w * g(side * n.x);
    sum += cfg.outer_r * g(side * cfg.outer_r);
  }
  return sum * 0.5 / std::numbers::pi;
}

double profile_integral_quadrature(double a, double c, const PVConfig& cfg) {
  if (!(c > 0.0)) throw std::invalid_argument("profile_integral_quadrature: c must be positive");
  const double q = 1.0 + a * a;
  auto profile = [a, c, q](double xi) {
    const double lead = q * xi * xi + 4.0 * c * c;
    const double cross = 4.0 * a * c * xi;
    return (-2.0 * a * c * xi - 2.0 * c * c) / (lead + cross) + (2.0 * a * c * xi - 2.0 * c * c) / (lead - cross);
  };
  return line_integral(profile, cfg);
}

double profile_integral_closed(double a, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("profile_integral_closed: c must be positive");
  return -c * (1.0 - a * a) / (1.0 + a * a);
}

double weight_consistency_error(const Weight& weight, const Vector& s_samples, const std::vector<double>& xi_samples) {
  double worst = 0.0;
  for (double s : s_samples) {
    const Weight::Column column = weight.column(s);
    const double inf = weight.phi_inf(s);
    for (double xi : xi_samples) {
      if (std::abs(xi) <= 1.0) continue;
      const WeightSample w = column(xi);
      worst = std::max(worst, std::abs(xi * (w.phi - inf) - w.bar));
    }
  }
  return worst;
}

}  // namespace muskat
