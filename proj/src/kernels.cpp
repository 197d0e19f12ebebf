#include "muskat/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace muskat {

double SlopeQuotient::operator()(double xi, double s) const {
  if (xi == 0.0) return z_.eval(s, 1);
  return z_.beta() + (z_.perturbation(s, 0) - z_.perturbation(s - xi, 0)) / xi;
}

Weight shifted_quotient_kernel(const CurveSlice& z, std::vector<ShiftedTerm> terms) {
  const double beta = z.beta();
  double total = 0.0;
  for (const ShiftedTerm& term : terms) total += term.weight;
  const double far = total / (1.0 + beta * beta);

  auto columns = [z, terms, beta](double s) {
    const double base = z.perturbation(s, 0);
    return Weight::Column([z, terms, beta, s, base](double xi) {
      const double shifted = s - xi;
      // zeta = zbar(s) - zbar(s - xi); the full increment is beta*xi + zeta.
      const double zeta = base - z.perturbation(shifted, 0);
      const double slope = beta + z.perturbation(shifted, 1);
      const double rise = beta * xi + zeta;
      WeightSample out;
      for (const ShiftedTerm& term : terms) {
        const double d = rise + term.shift;
        const double f = xi * xi / (xi * xi + d * d);
        const double y = d / xi;
        out.phi += term.weight * f;
        out.bar += term.weight * (-(y + beta) * (zeta + term.shift) * f / (1.0 + beta * beta));
        out.tilde += term.weight * (-2.0 * y * (slope - y) * f * f - f);
      }
      return out;
    });
  };
  return Weight(columns, [far](double) { return far; });
}

Weight phi0(const Curve& z0) { return shifted_quotient_kernel(CurveSlice(z0), {{2.0, 0.0}}); }

Weight phi_pm(const CurveSlice& z, double c, double t, int sign) {
  if (!(t > 0.0)) throw std::invalid_argument("phi_pm: t must be positive (use phi0 at t = 0)");
  if (sign != 1 && sign != -1) throw std::invalid_argument("phi_pm: sign must be +1 or -1");
  return shifted_quotient_kernel(z, {{1.0, 0.0}, {1.0, 2.0 * sign * c * t}});
}

Weight phi_ij(const CurveSlice& z, double c_i, double c_j, double t) {
  if (t < 0.0) throw std::invalid_argument("phi_ij: t must be non-negative");
  return shifted_quotient_kernel(z, {{1.0, (c_i - c_j) * t}, {1.0, (c_i + c_j) * t}});
}

Weight phi1(const Curve& z0, const ScalarField& z1) {
  if (!z1) throw std::invalid_argument("phi1: missing first-order samples");
  const double beta = z0.beta();
  auto columns = [z0, z1, beta](double s) {
    const double base = z0.perturbation(s, 0);
    const double v = z1(s, 0);
    return Weight::Column([z0, z1, beta, s, base, v](double xi) {
      const double shifted = s - xi;
      const double q0 = beta + (base - z0.perturbation(shifted, 0)) / xi;
      const double q1 = (v - z1(shifted, 0)) / xi;
      const double dq0 = beta + z0.perturbation(shifted, 1) - q0;  // xi dZ0/dxi
      const double dq1 = z1(shifted, 1) - q1;                       // xi dZ0'/dxi
      const double r = 1.0 / (1.0 + q0 * q0);
      WeightSample out;
      out.phi = -4.0 * q0 * q1 * r * r;
      out.bar = xi * out.phi;
      const double scaled_slope = -4.0 * (dq0 * q1 + q0 * dq1) * r * r + 16.0 * q0 * q0 * q1 * dq0 * r * r * r;
      out.tilde = scaled_slope - out.phi;
      return out;
    });
  };
  return Weight(columns, [](double) { return 0.0; });
}

std::pair<Weight, Weight> delta_split(const CurveSlice& z, const Curve& z0, double c_i, double c_j, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("delta_split: t must be positive");
  const SlopeQuotient zt(z);
  const SlopeQuotient zi(CurveSlice{z0});
  const double shifts[2] = {(c_i - c_j) * t, (c_i + c_j) * t};

  auto regular = [zt, zi, shifts](double xi, double s) {
    const double a = zt(xi, s);
    const double b = zi(xi, s);
    double sum = 0.0;
    for (double k : shifts)
      for (double sgn : {1.0, -1.0}) {
        const double d = a * xi + sgn * k;
        sum += xi * xi / (xi * xi + d * d);
      }
    return (b * b - a * a) / (2.0 * (1.0 + b * b)) * sum;
  };
  auto singular = [zt, zi, shifts](double xi, double s) {
    const double a = zt(xi, s);
    const double b = zi(xi, s);
    double sum = 0.0;
    for (double k : shifts) {
      const double ax = a * xi;
      sum += (-k * ax - 0.5 * k * k) / (xi * xi + (ax + k) * (ax + k));
      sum += (k * ax - 0.5 * k * k) / (xi * xi + (ax - k) * (ax - k));
    }
    return sum / (1.0 + b * b);
  };
  auto zero = [](double) { return 0.0; };
  return {Weight::from_phi(regular, zero), Weight::from_phi(singular, zero)};
}

double rescaled_profile(const CurveSlice& z, const Curve& z0, double c, double t, double xi, double s) {
  if (t < 0.0) throw std::invalid_argument("rescaled_profile: t must be non-negative");
  double a, b;
  if (t == 0.0) {
    a = b = z0.eval(s, 1);
  } else {
    a = SlopeQuotient(z)(t * xi, s);
    b = SlopeQuotient(CurveSlice{z0})(t * xi, s);
  }
  const double ax = a * xi;
  const double k = 2.0 * c;
  const double sum = (-k * ax - 0.5 * k * k) / (xi * xi + (ax + k) * (ax + k)) +
                     (k * ax - 0.5 * k * k) / (xi * xi + (ax - k) * (ax - k));
  return sum / (1.0 + b * b);
}

WeightReport weight_norm0(const Weight& weight, const Vector& s_samples, const std::vector<double>& xi_samples) {
  WeightReport r;
  for (double s : s_samples) {
    const Weight::Column column = weight.column(s);
    for (double xi : xi_samples) {
      if (xi == 0.0) continue;
      const WeightSample w = column(xi);
      if (!std::isfinite(w.phi) || !std::isfinite(w.bar) || !std::isfinite(w.tilde))
        throw std::domain_error("weight_norm0: non-finite sample");
      if (std::abs(xi) <= 1.0) {
        r.sup_phi_inner = std::max(r.sup_phi_inner, std::abs(w.phi));
      } else {
        r.sup_bar_outer = std::max(r.sup_bar_outer, std::abs(w.bar));
        r.sup_tilde_outer = std::max(r.sup_tilde_outer, std::abs(w.tilde));
      }
    }
  }
  r.norm0 = r.sup_phi_inner + r.sup_bar_outer + r.sup_tilde_outer;
  return r;
}

std::vector<double> norm_xi_samples(const PVConfig& cfg) {
  std::vector<double> xs = inner_nodes(cfg);
  const std::vector<double> outer = outer_nodes(0.0, cfg);
  xs.insert(xs.end(), outer.begin(), outer.end());
  for (int k = -20; k <= 20; ++k) {
    xs.push_back(std::ldexp(1.0, k));
    xs.push_back(-std::ldexp(1.0, k));
  }
  return xs;
}

}  // namespace muskat
