#pragma once

#include <functional>
#include <vector>

namespace eulerfan {

/// Nodes and weights of a fixed rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Truncated tanh-sinh (double exponential) rule with 2m+1 nodes on [-1, 1].
/// Converges rapidly for integrands that are analytic inside the interval even
/// when they are flat or singular at the endpoints.
QuadratureRule tanh_sinh(int m);

/// Adaptive Gauss-Kronrod (15 point) integral of f over [a, b].
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-12, double* error_estimate = nullptr);

}  // namespace eulerfan
