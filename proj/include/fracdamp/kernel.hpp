#pragma once

// Exponentially weighted fractional operators, their diffusive (augmented)
// realization, and closed-form frequency integrals of the diffusive kernel.

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdamp::kernel {

using cplx = std::complex<double>;

/// Order alpha in (0, 1) and exponential weight eta >= 0 of the damping kernel.
class FractionalParams {
 public:
  FractionalParams(double alpha, double eta);

  double alpha() const { return alpha_; }
  double eta() const { return eta_; }

  /// Throws std::domain_error naming `operation` unless eta > 0.
  void require_positive_eta(const std::string& operation) const;

 private:
  double alpha_;
  double eta_;
};

/// Normalizing constant of the diffusive representation, sin(alpha pi) / pi.
double gamma_const(double alpha);

/// Diffusive coupling weight |xi|^((2 alpha - 1) / 2). Returns +inf at xi = 0
/// when alpha < 1/2.
double p_weight(double xi, double alpha);

/// Real scalar samples on the uniform grid t_i = i dt, i = 0..N.
struct SampledSignal {
  double dt = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
  double max_abs() const;

  static SampledSignal sample(double dt, std::size_t steps,
                              const std::function<double(double)>& f);
  static SampledSignal zeros(double dt, std::size_t steps);
};

/// I^{order, eta} v on the sample grid. Product integration: the kernel
/// (t - s)^(order - 1) e^{-eta (t - s)} is integrated exactly against the
/// piecewise-linear interpolant of v.
SampledSignal fractional_integral_direct(const SampledSignal& v,
                                         const FractionalParams& params,
                                         double order);

/// Caputo-type derivative I^{1 - alpha, eta} v'. The derivative is formed by
/// second-order central differences (one-sided second order at the ends).
SampledSignal caputo_apply_direct(const SampledSignal& v,
                                  const FractionalParams& params);

enum class QuadratureStrategy {
  /// Nodes on (0, 1], log-mapped panels on [1, xi_max], inverted Gauss-Jacobi
  /// nodes covering [xi_max, inf).
  TailMapped,
  /// Nodes on (0, xi_max] only; the tail beyond xi_max is dropped.
  Truncated,
};

std::string to_string(QuadratureStrategy s);
QuadratureStrategy parse_strategy(const std::string& name);

/// Self-consistency check stored with every rule: the rule applied to
/// p(xi)^2 / (xi^2 + eta + i) against the closed form of that integral.
struct QuadratureCertificate {
  cplx rule_value;
  cplx exact_value;
  double relative_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return relative_error <= tolerance; }
};

class CertificateError : public std::runtime_error {
 public:
  CertificateError(const std::string& what, QuadratureCertificate cert)
      : std::runtime_error(what), certificate_(cert) {}
  const QuadratureCertificate& certificate() const { return certificate_; }

 private:
  QuadratureCertificate certificate_;
};

/// Rule for integrals over xi in (0, inf). Weights are plain measure weights:
/// sum_j weight_j f(xi_j) ~ int_0^inf f. Integrals over the whole real line
/// of even integrands use full_weight(j) = symmetry_factor * weight_j.
class DiffusiveQuadrature {
 public:
  DiffusiveQuadrature(std::vector<double> nodes, std::vector<double> weights,
                      FractionalParams params, QuadratureStrategy strategy);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double symmetry_factor() const { return 2.0; }
  double full_weight(std::size_t j) const { return symmetry_factor() * weights_[j]; }
  /// p(xi_j)
  double coupling(std::size_t j) const { return couplings_[j]; }
  /// Relaxation rate xi_j^2 + eta of node j.
  double relaxation(std::size_t j) const { return relaxations_[j]; }
  const FractionalParams& params() const { return params_; }
  double alpha() const { return params_.alpha(); }
  double eta() const { return params_.eta(); }
  double gamma() const { return gamma_; }
  QuadratureStrategy strategy() const { return strategy_; }
  const QuadratureCertificate& certificate() const { return certificate_; }

  /// gamma * sum_j full_weight_j p_j^2 / (z + relaxation_j): the discrete
  /// counterpart of gamma * int_R p^2 / (xi^2 + eta + z).
  cplx transfer(cplx z) const;

 private:
  friend DiffusiveQuadrature build_quadrature(const FractionalParams&, int, double,
                                              QuadratureStrategy, double);
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> couplings_;
  std::vector<double> relaxations_;
  FractionalParams params_;
  QuadratureStrategy strategy_;
  double gamma_;
  QuadratureCertificate certificate_;
};

inline constexpr int kDefaultNodes = 128;
inline constexpr double kDefaultXiMax = 1e4;
inline constexpr double kDefaultCertificateTolerance = 1e-8;

/// Builds the xi rule and its certificate. Throws CertificateError when the
/// certificate misses `tolerance` (xi_max or n_nodes too small).
DiffusiveQuadrature build_quadrature(const FractionalParams& params,
                                     int n_nodes = kDefaultNodes,
                                     double xi_max = kDefaultXiMax,
                                     QuadratureStrategy strategy = QuadratureStrategy::TailMapped,
                                     double tolerance = kDefaultCertificateTolerance);

/// O = I^{1 - alpha, eta} U realized through the node ODEs
///   phi_j' + (xi_j^2 + eta) phi_j = p(xi_j) U,  phi_j(0) = 0,
///   O = gamma * sum_j full_weight_j p(xi_j) phi_j,
/// stepped exactly for U piecewise linear between samples.
SampledSignal diffusive_apply(const SampledSignal& U, const DiffusiveQuadrature& quad);

/// Same recursion, also returning the node states at the final sample.
SampledSignal diffusive_apply(const SampledSignal& U, const DiffusiveQuadrature& quad,
                              std::vector<double>& final_states, double& max_state_ratio);

/// int_0^inf rho^(2 alpha - 1) / (rho^2 + eta + i omega) d rho, closed form.
cplx closed_integral_resolvent(const FractionalParams& params, double omega);

/// int_0^inf rho^(2 alpha - 1) / ((rho^2 + eta)^2 + omega^2) d rho, closed form.
double closed_integral_squared(const FractionalParams& params, double omega);

/// Adaptive quadrature values of the same two integrals (validation oracle).
cplx quadrature_integral_resolvent(double alpha, double eta, double omega);
double quadrature_integral_squared(double alpha, double eta, double omega);

struct KvCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// c1 = gamma int_R p^2 / ((xi^2 + eta)^2 + omega^2),
/// c2 = gamma int_R p^2 (xi^2 + eta) / ((xi^2 + eta)^2 + omega^2).
KvCoefficients kv_coefficients(const FractionalParams& params, double omega);

/// One line of the closed-form validation table.
struct BranchRow {
  double alpha = 0.0;
  double eta = 0.0;
  double omega = 0.0;
  std::string branch;       ///< "general" or "alpha=1/2"
  cplx resolvent_closed;
  cplx resolvent_quadrature;
  double resolvent_error = 0.0;
  double resolvent_printed_error = 0.0;  ///< error of the uncorrected formula
  double squared_closed = 0.0;
  double squared_quadrature = 0.0;
  double squared_error = 0.0;
  double squared_printed_error = 0.0;
};

std::vector<BranchRow> branch_report(std::span<const double> alphas,
                                     std::span<const double> etas,
                                     std::span<const double> omegas);

}  // namespace fracdamp::kernel
