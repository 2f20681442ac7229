#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fpprop {

/// Nodes of the n-point Gauss-Legendre rule on [-1, 1], ascending. Cached.
std::span<const double> gauss_legendre_nodes(int n);
/// Matching weights (sum to 2).
std::span<const double> gauss_legendre_weights(int n);

/// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b].
/// Bisects until the local error estimate is below
/// rel_tol * |segment| + abs_tol. Throws std::runtime_error if the interval
/// budget is exhausted.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 1e-300);

/// Composite Simpson rule with `panels` equal panels (>= 1).
double integrate_simpson(const std::function<double(double)>& f, double a, double b, int panels);

}  // namespace fpprop
