#include "fracdamp/gauss_jacobi.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace fracdamp::quadrature {

IntervalRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: need at least one point");
  if (!(a > -1.0) || !(b > -1.0))
    throw std::domain_error("gauss_jacobi: exponents must exceed -1");

  // Three-term recurrence of the monic Jacobi polynomials.
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
  const double ab = a + b;
  diag(0) = (b - a) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag(k) = (b * b - a * a) / (s * (s + 2.0));
    const double num = 4.0 * k * (k + a) * (k + b) * (k + ab);
    sub(k - 1) = std::sqrt(num / (s * s * (s + 1.0) * (s - 1.0)));
  }

  // Total mass of the weight function.
  const double log_mu0 = (ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                         std::lgamma(b + 1.0) - std::lgamma(ab + 2.0);
  const double mu0 = std::exp(log_mu0);

  IntervalRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.points[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_jacobi: eigenvalue solve failed");

  for (int j = 0; j < n; ++j) {
    rule.points[j] = solver.eigenvalues()(j);
    const double v0 = solver.eigenvectors()(0, j);
    rule.weights[j] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace fracdamp::quadrature
