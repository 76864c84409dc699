#pragma once

#include <vector>

namespace fracdamp::quadrature {

/// Nodes and weights of an interval rule on [-1, 1].
struct IntervalRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight (1 - x)^a (1 + x)^b on [-1, 1], a, b > -1.
/// Built with the Golub-Welsch eigenvalue method, so non-integer exponents
/// are fine. Points are returned in increasing order.
IntervalRule gauss_jacobi(int n, double a, double b);

/// Gauss-Legendre rule on [-1, 1].
inline IntervalRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

}  // namespace fracdamp::quadrature
