#include "fracdamp/kernel.hpp"

#include "fracdamp/gauss_jacobi.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fracdamp::kernel {

namespace {

constexpr double kPi = std::numbers::pi;

void require_alpha(double alpha, const char* where) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << where << ": alpha must lie in (0, 1), got " << alpha;
    throw std::domain_error(msg.str());
  }
}

void require_uniform(const SampledSignal& s, const char* where) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt))
    throw std::invalid_argument(std::string(where) + ": sample spacing dt must be positive");
  if (s.values.empty())
    throw std::invalid_argument(std::string(where) + ": empty signal");
}

// int_a^b tau^(s - 1) e^{-eta tau} d tau for 0 <= a < b.
double weighted_moment(double s, double eta, double a, double b) {
  if (eta == 0.0) return (std::pow(b, s) - std::pow(a, s)) / s;
  const double xa = eta * a;
  const double xb = eta * b;
  const double scale = std::exp(std::lgamma(s) - s * std::log(eta));
  // Difference the tail function away from the origin to keep digits.
  double diff;
  if (xa > s)
    diff = boost::math::gamma_q(s, xa) - boost::math::gamma_q(s, xb);
  else
    diff = boost::math::gamma_p(s, xb) - (xa > 0.0 ? boost::math::gamma_p(s, xa) : 0.0);
  return scale * diff;
}

// M = sqrt(eta^2 + omega^2) and M - eta without cancellation.
struct Modulus {
  double m;
  double m_minus_eta;
};

Modulus modulus(double eta, double w) {
  const double m = std::hypot(eta, w);
  return {m, w * w / (m + eta)};
}

// Pole angle of the resolvent integrand, as printed (w > 0).
double theta_angle(double eta, double w) {
  const auto [m, d] = modulus(eta, w);
  return std::acos(-std::sqrt(0.5 * d) / std::sqrt(m));
}

double phi_angle(double eta, double w) {
  const auto [m, d] = modulus(eta, w);
  return std::acos(std::sqrt(0.5 * d) / std::sqrt(m));
}

bool is_half(double alpha) { return std::abs(alpha - 0.5) < 1e-8; }

// General-alpha residue formula; valid for eta >= 0, w > 0, alpha != 1/2.
cplx resolvent_general(double alpha, double eta, double w) {
  const double m = std::hypot(eta, w);
  const double th = theta_angle(eta, w);
  const cplx one_plus = 1.0 + std::polar(1.0, -2.0 * alpha * kPi);
  return -kPi * one_plus / (2.0 * std::pow(m, 1.0 - alpha) * std::sin(2.0 * alpha * kPi)) *
         std::polar(1.0, 2.0 * (alpha - 1.0) * th);
}

// Validated closed form (eta >= 0, omega != 0). For w > 0 the general line is
// exact as printed; the alpha = 1/2 line needs the factor i (it is the limit
// of the general line); omega < 0 is the complex conjugate.
cplx resolvent_closed_unchecked(double alpha, double eta, double omega) {
  const double w = std::abs(omega);
  cplx value;
  if (is_half(alpha)) {
    const double m = std::hypot(eta, w);
    value = cplx(0.0, 1.0) * kPi / (2.0 * std::sqrt(m) * std::polar(1.0, theta_angle(eta, w)));
  } else {
    value = resolvent_general(alpha, eta, w);
  }
  return omega > 0.0 ? value : std::conj(value);
}

cplx resolvent_as_printed(double alpha, double eta, double omega) {
  const double m = std::hypot(eta, omega);
  const double th = [&] {
    const double d = omega * omega / (m + eta);
    return std::acos(-std::sqrt(0.5 * d) / std::sqrt(m));
  }();
  if (is_half(alpha)) return kPi / (2.0 * std::sqrt(m) * std::polar(1.0, th));
  const cplx one_plus = 1.0 + std::polar(1.0, -2.0 * alpha * kPi);
  return -kPi * one_plus / (2.0 * std::pow(m, 1.0 - alpha) * std::sin(2.0 * alpha * kPi)) *
         std::polar(1.0, 2.0 * (alpha - 1.0) * th);
}

double squared_general_as_printed(double alpha, double eta, double w) {
  const double m = std::hypot(eta, w);
  const double ph = phi_angle(eta, w);
  const double num = std::sin(2.0 * (alpha - 1.0) * (kPi - ph)) - std::sin(2.0 * (alpha - 1.0) * ph);
  return num / (std::sin(2.0 * alpha * kPi) * std::sin(2.0 * ph) * std::pow(m, 2.0 - alpha));
}

double squared_as_printed(double alpha, double eta, double omega) {
  const double w = std::abs(omega);
  if (is_half(alpha)) {
    const double m = std::hypot(eta, w);
    return 3.0 * (2.0 * kPi - phi_angle(eta, w)) / (8.0 * std::pow(m, 1.5));
  }
  return squared_general_as_printed(alpha, eta, w);
}

// Validated closed form. The printed general line is short by a factor pi/2;
// the alpha = 1/2 line is replaced by the limit of the general line,
// pi sqrt((M - eta)/2) / (2 |omega| M).
double squared_closed_unchecked(double alpha, double eta, double omega) {
  const double w = std::abs(omega);
  if (is_half(alpha)) {
    const auto [m, d] = modulus(eta, w);
    return kPi * std::sqrt(0.5 * d) / (2.0 * w * m);
  }
  return 0.5 * kPi * squared_general_as_printed(alpha, eta, w);
}

void require_omega(double omega, const char* where) {
  if (omega == 0.0 || !std::isfinite(omega))
    throw std::domain_error(std::string(where) + ": omega must be finite and nonzero");
}

// int_0^inf g(rho) d rho with endpoint singularity at 0 allowed.
template <class F>
double half_line(F g, double split) {
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  const double tol = 1e-13;
  double a = near.integrate(g, 0.0, 1.0, tol);
  double b = split > 1.0 ? near.integrate(g, 1.0, split, tol) : 0.0;
  double c = far.integrate(g, std::max(split, 1.0), std::numeric_limits<double>::infinity(), tol);
  return a + b + c;
}

double split_point(double eta, double omega) {
  return std::max(2.0, 2.0 * std::sqrt(std::hypot(eta, omega)));
}

}  // namespace

FractionalParams::FractionalParams(double alpha, double eta) : alpha_(alpha), eta_(eta) {
  require_alpha(alpha, "FractionalParams");
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    std::ostringstream msg;
    msg << "FractionalParams: eta must be finite and >= 0, got " << eta;
    throw std::domain_error(msg.str());
  }
}

void FractionalParams::require_positive_eta(const std::string& operation) const {
  if (!(eta_ > 0.0)) throw std::domain_error(operation + ": requires eta > 0");
}

double gamma_const(double alpha) {
  require_alpha(alpha, "gamma_const");
  // 2 sin(alpha pi) Gamma(3/2) / pi^(3/2) with Gamma(3/2) = sqrt(pi)/2.
  return std::sin(alpha * kPi) / kPi;
}

double p_weight(double xi, double alpha) {
  const double x = std::abs(xi);
  const double e = alpha - 0.5;
  if (x == 0.0) {
    if (e < 0.0) return std::numeric_limits<double>::infinity();
    return e == 0.0 ? 1.0 : 0.0;
  }
  return std::pow(x, e);
}

double SampledSignal::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

SampledSignal SampledSignal::sample(double dt, std::size_t steps,
                                    const std::function<double(double)>& f) {
  SampledSignal s;
  s.dt = dt;
  s.values.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) s.values[i] = f(static_cast<double>(i) * dt);
  return s;
}

SampledSignal SampledSignal::zeros(double dt, std::size_t steps) {
  SampledSignal s;
  s.dt = dt;
  s.values.assign(steps + 1, 0.0);
  return s;
}

SampledSignal fractional_integral_direct(const SampledSignal& v, const FractionalParams& params,
                                         double order) {
  require_uniform(v, "fractional_integral_direct");
  if (!(order > 0.0 && order < 1.0))
    throw std::domain_error("fractional_integral_direct: order must lie in (0, 1)");

  const std::size_t n = v.size();
  const double dt = v.dt;
  const double eta = params.eta();
  const double norm = 1.0 / std::tgamma(order);

  // Lag weights: the interval tau in [j dt, (j+1) dt] contributes
  // near_j * v(t - j dt) + far_j * v(t - (j+1) dt).
  std::vector<double> near(n), far(n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double a = static_cast<double>(j) * dt;
    const double b = a + dt;
    const double m0 = weighted_moment(order, eta, a, b);
    const double m1 = weighted_moment(order + 1.0, eta, a, b);
    // Linear interpolant in tau: v(t - tau) = v_near (b - tau)/dt + v_far (tau - a)/dt.
    near[j] = norm * (b * m0 - m1) / dt;
    far[j] = norm * (m1 - a * m0) / dt;
  }

  SampledSignal out;
  out.dt = dt;
  out.values.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += near[j] * v.values[i - j] + far[j] * v.values[i - j - 1];
    out.values[i] = acc;
  }
  return out;
}

SampledSignal caputo_apply_direct(const SampledSignal& v, const FractionalParams& params) {
  require_uniform(v, "caputo_apply_direct");
  const std::size_t n = v.size();
  if (n < 2) throw std::invalid_argument("caputo_apply_direct: need at least two samples");

  const double dt = v.dt;
  const auto& x = v.values;
  SampledSignal dv;
  dv.dt = dt;
  dv.values.resize(n);
  if (n == 2) {
    dv.values[0] = dv.values[1] = (x[1] - x[0]) / dt;
  } else {
    dv.values[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) dv.values[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
    dv.values[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * dt);
  }
  return fractional_integral_direct(dv, params, 1.0 - params.alpha());
}

std::string to_string(QuadratureStrategy s) {
  return s == QuadratureStrategy::TailMapped ? "tail_mapped" : "truncated";
}

QuadratureStrategy parse_strategy(const std::string& name) {
  if (name == "tail_mapped") return QuadratureStrategy::TailMapped;
  if (name == "truncated") return QuadratureStrategy::Truncated;
  throw std::invalid_argument("unknown quadrature strategy '" + name +
                              "' (expected tail_mapped or truncated)");
}

DiffusiveQuadrature::DiffusiveQuadrature(std::vector<double> nodes, std::vector<double> weights,
                                         FractionalParams params, QuadratureStrategy strategy)
    : nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      params_(params),
      strategy_(strategy),
      gamma_(gamma_const(params.alpha())) {
  if (nodes_.size() != weights_.size() || nodes_.empty())
    throw std::invalid_argument("DiffusiveQuadrature: nodes and weights must be nonempty and equal length");
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (!(nodes_[j] > 0.0) || !(weights_[j] > 0.0) || !std::isfinite(weights_[j]))
      throw std::invalid_argument("DiffusiveQuadrature: nodes and weights must be positive");
    if (j > 0 && !(nodes_[j] > nodes_[j - 1]))
      throw std::invalid_argument("DiffusiveQuadrature: nodes must be strictly increasing");
  }
  couplings_.resize(nodes_.size());
  relaxations_.resize(nodes_.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    couplings_[j] = p_weight(nodes_[j], params_.alpha());
    relaxations_[j] = nodes_[j] * nodes_[j] + params_.eta();
  }
}

cplx DiffusiveQuadrature::transfer(cplx z) const {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < size(); ++j)
    acc += full_weight(j) * couplings_[j] * couplings_[j] / (z + relaxations_[j]);
  return gamma_ * acc;
}

DiffusiveQuadrature build_quadrature(const FractionalParams& params, int n_nodes, double xi_max,
                                     QuadratureStrategy strategy, double tolerance) {
  if (n_nodes < 4) throw std::invalid_argument("build_quadrature: n_nodes must be >= 4");
  if (!(xi_max > 1.0) || !std::isfinite(xi_max))
    throw std::invalid_argument("build_quadrature: xi_max must be finite and > 1");

  const double alpha = params.alpha();
  const int n_low = std::max(1, n_nodes / 4);
  const int n_tail = strategy == QuadratureStrategy::TailMapped ? std::max(1, n_nodes / 8) : 0;
  const int n_mid = n_nodes - n_low - n_tail;

  std::vector<double> nodes, weights;
  nodes.reserve(n_nodes);
  weights.reserve(n_nodes);

  // (0, 1]: Gauss-Jacobi absorbing xi^(2 alpha - 1), xi = (1 + x) / 2.
  {
    const double b = 2.0 * alpha - 1.0;
    const auto rule = quadrature::gauss_jacobi(n_low, 0.0, b);
    for (int k = 0; k < n_low; ++k) {
      const double one_plus_x = 1.0 + rule.points[k];
      nodes.push_back(0.5 * one_plus_x);
      weights.push_back(rule.weights[k] / (2.0 * std::pow(one_plus_x, b)));
    }
  }

  // [1, xi_max]: Gauss-Legendre panels of equal width in log(xi).
  {
    const int panels = std::max(1, n_mid / 8);
    const double span = std::log(xi_max) / panels;
    for (int p = 0; p < panels; ++p) {
      const int count = n_mid / panels + (p < n_mid % panels ? 1 : 0);
      const auto rule = quadrature::gauss_legendre(count);
      const double mid = (p + 0.5) * span;
      const double half = 0.5 * span;
      for (int k = 0; k < count; ++k) {
        const double xi = std::exp(mid + half * rule.points[k]);
        nodes.push_back(xi);
        weights.push_back(rule.weights[k] * half * xi);
      }
    }
  }

  // [xi_max, inf): xi = xi_max / s, Gauss-Jacobi in s absorbing s^(1 - 2 alpha).
  if (n_tail > 0) {
    const double b = 1.0 - 2.0 * alpha;
    const auto rule = quadrature::gauss_jacobi(n_tail, 0.0, b);
    for (int k = n_tail - 1; k >= 0; --k) {
      const double one_plus_x = 1.0 + rule.points[k];
      const double s = 0.5 * one_plus_x;
      nodes.push_back(xi_max / s);
      weights.push_back(rule.weights[k] / (2.0 * std::pow(one_plus_x, b)) * xi_max / (s * s));
    }
  }

  DiffusiveQuadrature quad(std::move(nodes), std::move(weights), params, strategy);

  QuadratureCertificate cert;
  cert.tolerance = tolerance;
  cplx rule_value = 0.0;
  for (std::size_t j = 0; j < quad.size(); ++j) {
    const double p = quad.coupling(j);
    rule_value += quad.weights()[j] * p * p / cplx(quad.relaxation(j), 1.0);
  }
  cert.rule_value = rule_value;
  cert.exact_value = resolvent_closed_unchecked(alpha, params.eta(), 1.0);
  cert.relative_error = std::abs(rule_value - cert.exact_value) / std::abs(cert.exact_value);
  quad.certificate_ = cert;

  if (!cert.passed()) {
    std::ostringstream msg;
    msg << "quadrature certificate failed: relative error " << cert.relative_error
        << " exceeds tolerance " << tolerance << " (n_nodes=" << n_nodes << ", xi_max=" << xi_max
        << ", strategy=" << to_string(strategy) << "); increase xi_max or n_nodes";
    throw CertificateError(msg.str(), cert);
  }
  return quad;
}

namespace {

// phi_1(z) = (1 - e^{-z}) / z and phi_2(z) = (z - 1 + e^{-z}) / z^2.
double phi1(double z) { return z < 1e-8 ? 1.0 - 0.5 * z : -std::expm1(-z) / z; }
double phi2(double z) {
  if (z < 1e-3) return 0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0;
  return (z + std::expm1(-z)) / (z * z);
}

}  // namespace

SampledSignal diffusive_apply(const SampledSignal& U, const DiffusiveQuadrature& quad,
                              std::vector<double>& states, double& max_state_ratio) {
  require_uniform(U, "diffusive_apply");
  const std::size_t n = U.size();
  const std::size_t m = quad.size();
  const double dt = U.dt;

  // Exact update for U linear on the step:
  //   phi+ = e^{-c dt} phi + p (dt phi1 U_k + dt phi2 (U_{k+1} - U_k)).
  std::vector<double> decay(m), w0(m), w1(m), out_w(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double z = quad.relaxation(j) * dt;
    decay[j] = std::exp(-z);
    w0[j] = dt * phi1(z);
    w1[j] = dt * phi2(z);
    out_w[j] = quad.gamma() * quad.full_weight(j) * quad.coupling(j);
  }

  const double u_max = U.max_abs();
  max_state_ratio = 0.0;
  states.assign(m, 0.0);
  SampledSignal out;
  out.dt = dt;
  out.values.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double u0 = U.values[k];
    const double du = U.values[k + 1] - u0;
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      states[j] = decay[j] * states[j] + quad.coupling(j) * (w0[j] * u0 + w1[j] * du);
      acc += out_w[j] * states[j];
      if (u_max > 0.0) {
        const double bound = u_max * quad.coupling(j) / quad.relaxation(j);
        max_state_ratio = std::max(max_state_ratio, std::abs(states[j]) / bound);
      }
    }
    out.values[k + 1] = acc;
  }
  return out;
}

SampledSignal diffusive_apply(const SampledSignal& U, const DiffusiveQuadrature& quad) {
  std::vector<double> states;
  double ratio = 0.0;
  return diffusive_apply(U, quad, states, ratio);
}

cplx closed_integral_resolvent(const FractionalParams& params, double omega) {
  params.require_positive_eta("closed_integral_resolvent");
  require_omega(omega, "closed_integral_resolvent");
  return resolvent_closed_unchecked(params.alpha(), params.eta(), omega);
}

double closed_integral_squared(const FractionalParams& params, double omega) {
  params.require_positive_eta("closed_integral_squared");
  require_omega(omega, "closed_integral_squared");
  return squared_closed_unchecked(params.alpha(), params.eta(), omega);
}

cplx quadrature_integral_resolvent(double alpha, double eta, double omega) {
  require_alpha(alpha, "quadrature_integral_resolvent");
  const double e = 2.0 * alpha - 1.0;
  const double split = split_point(eta, omega);
  auto re = [=](double r) {
    const double a = r * r + eta;
    return std::pow(r, e) * a / (a * a + omega * omega);
  };
  auto im = [=](double r) {
    const double a = r * r + eta;
    return -std::pow(r, e) * omega / (a * a + omega * omega);
  };
  return {half_line(re, split), omega == 0.0 ? 0.0 : half_line(im, split)};
}

double quadrature_integral_squared(double alpha, double eta, double omega) {
  require_alpha(alpha, "quadrature_integral_squared");
  const double e = 2.0 * alpha - 1.0;
  auto f = [=](double r) {
    const double a = r * r + eta;
    return std::pow(r, e) / (a * a + omega * omega);
  };
  return half_line(f, split_point(eta, omega));
}

KvCoefficients kv_coefficients(const FractionalParams& params, double omega) {
  params.require_positive_eta("kv_coefficients");
  const double g = gamma_const(params.alpha());
  const double e = 2.0 * params.alpha() - 1.0;
  const double eta = params.eta();
  KvCoefficients c;
  c.c1 = omega == 0.0 ? 2.0 * g * quadrature_integral_squared(params.alpha(), eta, 0.0)
                      : 2.0 * g * closed_integral_squared(params, omega);
  auto f = [=](double r) {
    const double a = r * r + eta;
    return std::pow(r, e) * a / (a * a + omega * omega);
  };
  c.c2 = 2.0 * g * half_line(f, split_point(eta, omega));
  return c;
}

std::vector<BranchRow> branch_report(std::span<const double> alphas, std::span<const double> etas,
                                     std::span<const double> omegas) {
  std::vector<BranchRow> rows;
  rows.reserve(alphas.size() * etas.size() * omegas.size());
  for (double a : alphas)
    for (double e : etas)
      for (double w : omegas) {
        const FractionalParams params(a, e);
        BranchRow r;
        r.alpha = a;
        r.eta = e;
        r.omega = w;
        r.branch = is_half(a) ? "alpha=1/2" : "general";
        r.resolvent_closed = closed_integral_resolvent(params, w);
        r.resolvent_quadrature = quadrature_integral_resolvent(a, e, w);
        const double rq = std::abs(r.resolvent_quadrature);
        r.resolvent_error = std::abs(r.resolvent_closed - r.resolvent_quadrature) / rq;
        r.resolvent_printed_error = std::abs(resolvent_as_printed(a, e, w) - r.resolvent_quadrature) / rq;
        r.squared_closed = closed_integral_squared(params, w);
        r.squared_quadrature = quadrature_integral_squared(a, e, w);
        r.squared_error = std::abs(r.squared_closed - r.squared_quadrature) / r.squared_quadrature;
        r.squared_printed_error = std::abs(squared_as_printed(a, e, w) - r.squared_quadrature) / r.squared_quadrature;
        rows.push_back(r);
      }
  return rows;
}

}  // namespace fracdamp::kernel
