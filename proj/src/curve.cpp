#include "muskat/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace muskat {

Grid::Grid(double s_max, Eigen::Index n) : s_max_(s_max), n_(n) {
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw std::invalid_argument("Grid: s_max must be positive");
  if (n < 2) throw std::invalid_argument("Grid: need at least two points");
}

Vector Grid::nodes() const { return Vector::LinSpaced(n_, -s_max_, s_max_); }

Eigen::Index Grid::nearest(double s) const {
  const double r = std::round((s + s_max_) / spacing());
  return static_cast<Eigen::Index>(std::clamp(r, 0.0, static_cast<double>(n_ - 1)));
}

namespace {

// Stencil start for `width` points around node i, shifted inside [0, n).
Eigen::Index stencil_start(Eigen::Index i, Eigen::Index n, Eigen::Index width) {
  return std::clamp<Eigen::Index>(i - width / 2, 0, n - width);
}

Vector differentiate(const Grid& grid, const Vector& f, int order) {
  const Eigen::Index n = grid.size();
  const Eigen::Index width = order == 1 ? 5 : 7;
  if (n < width) throw std::invalid_argument("SampledFunction: grid too small for 4th-order differences");
  const double h = grid.spacing();
  Vector out(n);

  // Offsets in units of h; the interior stencil is shared by every node.
  auto weights_for = [&](Eigen::Index start, Eigen::Index i) {
    std::vector<double> xs(width);
    for (Eigen::Index k = 0; k < width; ++k) xs[k] = static_cast<double>(start + k - i);
    return Vector(fd_weights(0.0, xs, order) / std::pow(h, order));
  };
  const Vector interior = weights_for(0, width / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index start = stencil_start(i, n, width);
    const bool centred = start == i - width / 2;
    out[i] = centred ? interior.dot(f.segment(start, width)) : weights_for(start, i).dot(f.segment(start, width));
  }
  return out;
}

}  // namespace

SampledFunction::SampledFunction(Grid grid, Vector values, Extension extension)
    : grid_(grid), extension_(extension) {
  if (values.size() != grid.size()) throw std::invalid_argument("SampledFunction: sample count does not match grid");
  if (!values.allFinite()) throw std::domain_error("SampledFunction: non-finite sample");
  zero_ = (values.array() == 0.0).all();
  d_[0] = std::move(values);
  for (int j = 1; j <= 3; ++j) d_[j] = zero_ ? Vector::Zero(grid_.size()) : differentiate(grid_, d_[0], j);

  if (extension_ == Extension::algebraic_tail && !zero_) {
    const Eigen::Index last = grid_.size() - 1;
    for (int end = 0; end < 2; ++end) {
      const Eigen::Index i = end == 0 ? 0 : last;
      const double x = grid_[i];
      Eigen::Matrix2d system;
      system << 1.0 / (x * x), 1.0 / (x * x * x), -2.0 / (x * x * x), -3.0 / (x * x * x * x);
      tail_[end] = system.partialPivLu().solve(Eigen::Vector2d(d_[0][i], d_[1][i]));
    }
  }
}

const Vector& SampledFunction::derivative(int order) const {
  if (order < 0 || order > 3) throw std::out_of_range("SampledFunction: derivative order must be 0..3");
  return d_[order];
}

double SampledFunction::tail(double s, int j, int end) const {
  const double a = tail_[end][0];
  const double b = tail_[end][1];
  const double r = 1.0 / s;
  const double r2 = r * r;
  switch (j) {
    case 0: return r2 * (a + b * r);
    case 1: return -r2 * r * (2.0 * a + 3.0 * b * r);
    case 2: return r2 * r2 * (6.0 * a + 12.0 * b * r);
    default: return -r2 * r2 * r * (24.0 * a + 60.0 * b * r);
  }
}

double SampledFunction::operator()(double s, int j) const {
  if (j < 0 || j > 3) throw std::out_of_range("SampledFunction: derivative order must be 0..3");
  if (zero_) return 0.0;
  const double h = grid_.spacing();
  const Eigen::Index n = grid_.size();
  if (s < grid_.s_min() || s > grid_.s_max()) {
    if (extension_ == Extension::none) throw std::out_of_range("SampledFunction: s outside sampled support");
    return tail(s, j, s < 0.0 ? 0 : 1);
  }
  const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>((s - grid_.s_min()) / h), n - 2);
  const double u = (s - grid_[i]) / h;

  const double f0 = d_[0][i], f1 = d_[0][i + 1];
  const double g0 = h * d_[1][i], g1 = h * d_[1][i + 1];
  const double k0 = h * h * d_[2][i], k1 = h * h * d_[2][i + 1];
  // Monomial coefficients of the quintic Hermite interpolant in u.
  const double c3 = 10.0 * (f1 - f0) - 6.0 * g0 - 4.0 * g1 - 1.5 * k0 + 0.5 * k1;
  const double c4 = -15.0 * (f1 - f0) + 8.0 * g0 + 7.0 * g1 + 1.5 * k0 - k1;
  const double c5 = 6.0 * (f1 - f0) - 3.0 * g0 - 3.0 * g1 - 0.5 * k0 + 0.5 * k1;
  switch (j) {
    case 0: return f0 + u * (g0 + u * (0.5 * k0 + u * (c3 + u * (c4 + u * c5))));
    case 1: return (g0 + u * (k0 + u * (3.0 * c3 + u * (4.0 * c4 + u * 5.0 * c5)))) / h;
    case 2: return (k0 + u * (6.0 * c3 + u * (12.0 * c4 + u * 20.0 * c5))) / (h * h);
    default: return (6.0 * c3 + u * (24.0 * c4 + u * 60.0 * c5)) / (h * h * h);
  }
}

ScalarField SampledFunction::field() const {
  return [self = std::make_shared<const SampledFunction>(*this)](double s, int j) { return (*self)(s, j); };
}

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::flat: return "flat";
    case CurveKind::tilted: return "tilted";
    case CurveKind::gaussian_bump: return "gaussian-bump";
    case CurveKind::rational_bump: return "rational-bump";
    case CurveKind::sampled: return "sampled";
  }
  return "unknown";
}

CurveKind curve_kind_from_string(const std::string& name) {
  for (auto kind : {CurveKind::flat, CurveKind::tilted, CurveKind::gaussian_bump, CurveKind::rational_bump,
                    CurveKind::sampled})
    if (to_string(kind) == name) return kind;
  throw std::invalid_argument("unknown curve kind '" + name + "'");
}

Curve::Curve(CurveKind kind, double beta, double alpha, double amplitude, double width)
    : kind_(kind), beta_(beta), alpha_(alpha), amplitude_(amplitude), width_(width) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("Curve: alpha must lie in (0,1)");
  if (!std::isfinite(beta) || !std::isfinite(amplitude)) throw std::invalid_argument("Curve: non-finite parameter");
  if ((kind == CurveKind::gaussian_bump || kind == CurveKind::rational_bump) && !(width > 0.0))
    throw std::invalid_argument("Curve: width must be positive");
}

Curve Curve::flat(double alpha) { return {CurveKind::flat, 0.0, alpha, 0.0, 1.0}; }

Curve Curve::tilted(double beta, double alpha) { return {CurveKind::tilted, beta, alpha, 0.0, 1.0}; }

Curve Curve::gaussian_bump(double amplitude, double width, double beta, double alpha) {
  return {CurveKind::gaussian_bump, beta, alpha, amplitude, width};
}

Curve Curve::rational_bump(double amplitude, double width, double beta, double alpha) {
  return {CurveKind::rational_bump, beta, alpha, amplitude, width};
}

Curve Curve::sampled(const Grid& grid, const Vector& perturbation, double beta, double alpha, Extension extension) {
  Curve c{CurveKind::sampled, beta, alpha, 1.0, 1.0};
  c.samples_ = std::make_shared<const SampledFunction>(grid, perturbation, extension);
  return c;
}

double Curve::perturbation(double s, int j) const {
  if (j < 0 || j > 3) throw std::out_of_range("Curve: derivative order must be 0..3");
  switch (kind_) {
    case CurveKind::flat:
    case CurveKind::tilted:
      return 0.0;
    case CurveKind::gaussian_bump: {
      const double u = s / width_;
      const double e = amplitude_ * std::exp(-u * u);
      switch (j) {
        case 0: return e;
        case 1: return -2.0 * u * e / width_;
        case 2: return (4.0 * u * u - 2.0) * e / (width_ * width_);
        default: return (12.0 * u - 8.0 * u * u * u) * e / (width_ * width_ * width_);
      }
    }
    case CurveKind::rational_bump: {
      const double u = s / width_;
      const double q = 1.0 / (1.0 + u * u);
      switch (j) {
        case 0: return amplitude_ * q;
        case 1: return -2.0 * amplitude_ * u * q * q / width_;
        case 2: return amplitude_ * (6.0 * u * u - 2.0) * q * q * q / (width_ * width_);
        default: return 24.0 * amplitude_ * u * (1.0 - u * u) * q * q * q * q / (width_ * width_ * width_);
      }
    }
    case CurveKind::sampled:
      return (*samples_)(s, j);
  }
  return 0.0;
}

double Curve::eval(double s, int j) const {
  const double p = perturbation(s, j);
  if (j == 0) return beta_ * s + p;
  if (j == 1) return beta_ + p;
  return p;
}

ScalarField Curve::perturbation_field() const {
  return [self = *this](double s, int j) { return self.perturbation(s, j); };
}

std::vector<Vector> Curve::perturbation_samples(const Grid& grid, int k) const {
  if (k < 0 || k > 3) throw std::out_of_range("Curve: derivative order must be 0..3");
  std::vector<Vector> out(k + 1, Vector(grid.size()));
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    for (int j = 0; j <= k; ++j) out[j][i] = perturbation(grid[i], j);
  return out;
}

bool Curve::has_zero_perturbation() const {
  switch (kind_) {
    case CurveKind::flat:
    case CurveKind::tilted: return true;
    case CurveKind::sampled: return samples_->identically_zero();
    default: return amplitude_ == 0.0;
  }
}

CurveSlice::CurveSlice(Curve z0) : z0_(std::move(z0)) {}

CurveSlice::CurveSlice(Curve z0, std::shared_ptr<const SampledFunction> z1, std::shared_ptr<const SampledFunction> z2,
                       double t)
    : z0_(std::move(z0)), z1_(std::move(z1)), z2_(std::move(z2)), t_(t) {
  if (t < 0.0) throw std::invalid_argument("CurveSlice: t must be non-negative");
  if (z1_ && z1_->identically_zero()) z1_.reset();
  if (z2_ && z2_->identically_zero()) z2_.reset();
}

double CurveSlice::perturbation(double s, int j) const {
  double v = z0_.perturbation(s, j);
  if (t_ != 0.0) {
    if (z1_) v += t_ * (*z1_)(s, j);
    if (z2_) v += 0.5 * t_ * t_ * (*z2_)(s, j);
  }
  return v;
}

double CurveSlice::eval(double s, int j) const {
  const double p = perturbation(s, j);
  if (j == 0) return z0_.beta() * s + p;
  if (j == 1) return z0_.beta() + p;
  return p;
}

ScalarField CurveSlice::perturbation_field() const {
  return [self = *this](double s, int j) { return self.perturbation(s, j); };
}

ScalarField CurveSlice::field() const {
  return [self = *this](double s, int j) { return self.eval(s, j); };
}

namespace {
Vector decay_weight(const Grid& grid, double alpha) {
  return (1.0 + grid.nodes().array().abs().pow(1.0 + alpha)).matrix();
}
}  // namespace

double weighted_sup(const Vector& f, double alpha, const Grid& grid) {
  if (f.size() == 0) throw std::invalid_argument("weighted_sup: empty sample set");
  if (f.size() != grid.size()) throw std::invalid_argument("weighted_sup: sample count does not match grid");
  return (decay_weight(grid, alpha).array() * f.array().abs()).maxCoeff();
}

double holder_seminorm_star(const Vector& f, double alpha, const Grid& grid) {
  if (f.size() == 0) throw std::invalid_argument("holder_seminorm_star: empty sample set");
  if (f.size() != grid.size()) throw std::invalid_argument("holder_seminorm_star: sample count does not match grid");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("holder_seminorm_star: alpha must lie in (0,1)");
  if (!f.allFinite()) throw std::domain_error("holder_seminorm_star: non-finite sample");
  const Eigen::Index n = f.size();
  const double h = grid.spacing();
  const Vector w = decay_weight(grid, alpha);
  const auto max_offset = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(std::floor(1.0 / h + 1e-9)));
  double best = 0.0;
  for (Eigen::Index m = 1; m <= max_offset; ++m) {
    const Eigen::Index len = n - m;
    // Pair (i, i+m) is seen from both endpoints; keep the larger weight.
    const auto diff = (f.segment(m, len) - f.head(len)).array().abs();
    const auto weight = w.head(len).array().max(w.segment(m, len).array());
    best = std::max(best, (diff * weight).maxCoeff() / std::pow(m * h, alpha));
  }
  return best;
}

double norm_k_alpha_star(const std::vector<Vector>& derivatives, int k, double alpha, const Grid& grid) {
  if (k < 0 || k > 3) throw std::out_of_range("norm_k_alpha_star: k must be 0..3");
  if (static_cast<int>(derivatives.size()) < k + 1) throw std::invalid_argument("norm_k_alpha_star: missing derivative samples");
  double sup = 0.0;
  for (int j = 0; j <= k; ++j) sup = std::max(sup, weighted_sup(derivatives[j], alpha, grid));
  return sup + holder_seminorm_star(derivatives[k], alpha, grid);
}

std::pair<double, double> normalize_densities(double rho_plus, double rho_minus) {
  if (rho_plus == rho_minus) throw std::invalid_argument("normalize_densities: equal densities give no interface");
  return {(rho_plus - rho_minus) / 2.0, (rho_plus + rho_minus) / 2.0};
}

}  // namespace muskat
