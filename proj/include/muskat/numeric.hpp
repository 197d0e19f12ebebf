#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace muskat {

using Vector = Eigen::VectorXd;
using Point = Eigen::Vector2d;

// Nodes and weights on [-1, 1].
struct QuadratureRule {
  Vector nodes;
  Vector weights;
};

// Golub-Welsch; cached per n, so repeated calls are cheap.
const QuadratureRule& gauss_legendre(int n);

// Finite-difference weights for the derivative of order `order` at x0 using
// the sample abscissae `xs` (Fornberg's recursion).
Vector fd_weights(double x0, std::span<const double> xs, int order);

// Adaptive Gauss-Kronrod (7/15) on [a, b]; b may be +infinity.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_depth = 20);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Worker count used by parallel_for; 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is written by exactly one worker,
// so results are independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace muskat
