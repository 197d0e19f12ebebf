#include "muskat/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

namespace muskat {

const QuadratureRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  // Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule rule{eig.eigenvalues(), 2.0 * eig.eigenvectors().row(0).transpose().array().square()};

  // One Newton sweep on P_n polishes the nodes to full precision.
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = n == 1 ? x : p1;
    const double pm = n == 1 ? 1.0 : p0;
    const double dp = n * (x * pn - pm) / (x * x - 1.0);
    x -= pn / dp;
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

Vector fd_weights(double x0, std::span<const double> xs, int order) {
  const int n = static_cast<int>(xs.size());
  if (order < 0 || order >= n) throw std::invalid_argument("fd_weights: need more points than the order");
  // c(j, k): weight of xs[j] for the k-th derivative.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, order + 1);
  c(0, 0) = 1.0;
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(order);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  if (a == b) return 0.0;
  if (std::isinf(b)) {
    // x = a + u/(1-u) maps [0, 1) onto [a, inf).
    auto g = [&](double u) {
      if (u >= 1.0) return 0.0;
      const double v = 1.0 - u;
      return f(a + u / v) / (v * v);
    };
    return integrate_adaptive(g, 0.0, 1.0, tol, max_depth);
  }

  struct Piece {
    double lo, hi, value, error;
    int depth;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto evaluate = [&](double lo, double hi, int depth) {
    double err = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
    return Piece{lo, hi, v, err, depth};
  };

  std::priority_queue<Piece> queue;
  Piece first = evaluate(a, b, 0);
  double total = first.value;
  double total_error = first.error;
  queue.push(first);
  while (total_error > tol * std::max(1.0, std::abs(total)) && !queue.empty()) {
    Piece worst = queue.top();
    if (worst.depth >= max_depth) break;
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Piece left = evaluate(worst.lo, mid, worst.depth + 1);
    Piece right = evaluate(mid, worst.hi, worst.depth + 1);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  if (!std::isfinite(total)) throw std::domain_error("integrate_adaptive: non-finite result");
  return total;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need matching samples");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Vector rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw std::domain_error("loglog_slope: non-positive sample");
    design(i, 0) = std::log(x[i]);
    design(i, 1) = 1.0;
    rhs[i] = std::log(y[i]);
  }
  const Eigen::Vector2d fit = design.colPivHouseholderQr().solve(rhs);
  return fit[0];
}

namespace {
std::atomic<unsigned> configured_threads{0};
}

void set_thread_count(unsigned n) { configured_threads = n; }

unsigned thread_count() {
  const unsigned n = configured_threads.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    try {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace muskat
