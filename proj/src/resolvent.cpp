#include "fracdamp/resolvent.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace fracdamp::resolvent {

namespace {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

constexpr double kSpectrumTol = 1e-13;
constexpr int kLanczosMaxIter = 120;
constexpr double kLanczosTol = 1e-13;

void check_augmented_eta(const Generator& gen, const char* op) {
  if (!gen.classical() && !(gen.eta() > 0.0)) {
    std::ostringstream msg;
    msg << op << ": eta = 0 places 0 in the spectrum of the augmented generator "
        << "(-A is not onto), so resolvent estimates need eta > 0";
    throw std::domain_error(msg.str());
  }
}

/// Scale of the non-stiff part of i w - A, used to decide when a small
/// singular value means "in the spectrum".
double wave_scale(const Generator& gen, double omega) {
  double g = 0.0;
  for (int k = 0; k < gen.G().outerSize(); ++k) {
    double row = 0.0;
    for (spatial::SparseMatrix::InnerIterator it(gen.G(), k); it; ++it) row += std::abs(it.value());
    g = std::max(g, row);
  }
  return std::abs(omega) + 2.0 / gen.h() + g;
}

double max_relaxation(const Generator& gen) {
  double c = 0.0;
  if (!gen.classical())
    for (int j = 0; j < gen.n_xi(); ++j) c = std::max(c, gen.relaxation(j));
  return c;
}

NormResult dense_norm(const Generator& gen, double omega) {
  const Eigen::VectorXd s = scaled_singular_values(gen, omega);
  NormResult r;
  r.backend = NormBackend::Dense;
  const double smin = s(0);
  const double smax = s(s.size() - 1);
  r.flagged = !(smin > kSpectrumTol * smax);
  r.norm = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
  return r;
}

NormResult lanczos_norm(const Generator& gen, double omega) {
  NormResult r;
  r.backend = NormBackend::Lanczos;
  const cplx z(0.0, omega);
  const int N = gen.dim();

  auto op = [&](const CVector& q) -> CVector {
    const CVector x = gen.solve_shifted(z, q, 1);
    return -gen.solve_shifted(z, x, -1);
  };

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  CVector q(N);
  for (int i = 0; i < N; ++i) q(i) = cplx(normal(rng), normal(rng));
  q /= gen.norm(q);

  std::vector<CVector> basis;
  std::vector<double> alpha, beta;
  double theta = 0.0;
  try {
    for (int k = 0; k < std::min(kLanczosMaxIter, N); ++k) {
      basis.push_back(q);
      CVector w = op(q);
      const double a = gen.inner(w, q).real();
      alpha.push_back(a);
      w -= a * q;
      if (k > 0) w -= beta.back() * basis[k - 1];
      for (int pass = 0; pass < 2; ++pass)
        for (const CVector& b : basis) w -= gen.inner(w, b) * b;
      const double b = gen.norm(w);

      const int m = static_cast<int>(alpha.size());
      double last = 1.0;
      if (m == 1) {
        theta = alpha[0];
      } else {
        Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        theta = es.eigenvalues()(m - 1);
        last = es.eigenvectors()(m - 1, m - 1);
      }
      r.iterations = k + 1;
      if (std::abs(b * last) <= kLanczosTol * std::abs(theta) || b <= kLanczosTol * std::abs(theta))
        break;
      beta.push_back(b);
      q = w / b;
    }
  } catch (const std::runtime_error&) {
    r.norm = std::numeric_limits<double>::infinity();
    r.flagged = true;
    return r;
  }
  r.norm = std::sqrt(std::max(theta, 0.0));
  r.flagged = !(r.norm > 0.0) || !std::isfinite(r.norm) ||
              1.0 / r.norm <= kSpectrumTol * wave_scale(gen, omega);
  return r;
}

}  // namespace

std::string to_string(Which w) { return w == Which::Augmented ? "augmented" : "classical"; }

std::string to_string(NormBackend b) {
  switch (b) {
    case NormBackend::Auto: return "auto";
    case NormBackend::Dense: return "dense";
    case NormBackend::Lanczos: return "lanczos";
  }
  return "auto";
}

NormBackend parse_backend(const std::string& name) {
  if (name == "auto") return NormBackend::Auto;
  if (name == "dense") return NormBackend::Dense;
  if (name == "lanczos") return NormBackend::Lanczos;
  throw std::invalid_argument("unknown resolvent backend '" + name +
                              "' (expected auto, dense or lanczos)");
}

Generator assemble_classical(const Grid1D& grid, const DampingConfig& config) {
  return Generator(grid, config);
}

Eigen::VectorXd scaled_singular_values(const Generator& gen, double omega) {
  const int N = gen.dim();
  const MatrixXd W = MatrixXd(gen.metric());
  Eigen::LLT<MatrixXd> llt(W);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("scaled_singular_values: metric is not positive definite");
  const MatrixXd L = llt.matrixL();

  MatrixXcd Z = -MatrixXd(gen.matrix()).cast<cplx>();
  Z.diagonal().array() += cplx(0.0, omega);
  // M = L^T Z L^{-T}; Z L^{-T} = (L^{-1} Z^T)^T.
  const MatrixXcd Lc = L.cast<cplx>();
  const MatrixXcd ZLt = Lc.triangularView<Eigen::Lower>().solve(Z.transpose()).transpose();
  const MatrixXcd M = Lc.transpose() * ZLt;
  Eigen::BDCSVD<MatrixXcd> svd(M);
  Eigen::VectorXd s = svd.singularValues();
  std::sort(s.data(), s.data() + N);
  return s;
}

NormResult resolvent_norm(const Generator& gen, double omega, NormBackend backend) {
  check_augmented_eta(gen, "resolvent_norm");
  if (omega == 0.0 || !std::isfinite(omega))
    throw std::invalid_argument("resolvent_norm: omega must be finite and nonzero");
  if (backend == NormBackend::Auto) {
    const bool small = gen.dim() <= kDenseDimLimit;
    const bool mild = max_relaxation(gen) <= 1e3 * wave_scale(gen, omega);
    backend = small && mild ? NormBackend::Dense : NormBackend::Lanczos;
  }
  return backend == NormBackend::Dense ? dense_norm(gen, omega) : lanczos_norm(gen, omega);
}

ResolventScan scan(const Generator& gen, std::span<const double> omegas, NormBackend backend) {
  ResolventScan s;
  s.which = gen.classical() ? Which::Classical : Which::Augmented;
  if (omegas.empty()) return s;
  check_augmented_eta(gen, "scan");
  for (double w : omegas) {
    const NormResult r = resolvent_norm(gen, w, backend);
    s.omegas.push_back(w);
    s.norms.push_back(r.norm);
    s.flagged.push_back(r.flagged);
  }
  return s;
}

double nyquist(const Grid1D& grid) { return std::numbers::pi / grid.h(); }

std::vector<double> log_grid(double lo, double hi, int points) {
  if (points < 0) throw std::invalid_argument("log_grid: negative point count");
  if (points == 0) return {};
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_grid: need 0 < lo <= hi");
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) out[i] = std::exp(a + (b - a) * i / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> modal_band(const Grid1D& grid, double lo, double hi, int points) {
  std::vector<double> freqs;
  for (int k = 1; k <= grid.n(); ++k) {
    const double w = std::sqrt(spatial::laplacian_eigenvalue(k, grid));
    if (w >= lo && w <= hi) freqs.push_back(w);
  }
  std::vector<double> out;
  if (freqs.empty()) return out;
  for (double target : log_grid(lo, hi, points)) {
    auto it = std::lower_bound(freqs.begin(), freqs.end(), target);
    double best;
    if (it == freqs.end()) best = freqs.back();
    else if (it == freqs.begin()) best = *it;
    else best = (target - *(it - 1) <= *it - target) ? *(it - 1) : *it;
    if (out.empty() || out.back() != best) out.push_back(best);
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need at least two (x, y) pairs");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  f.slope_stderr = x.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  return f;
}

GrowthFit fit_growth(const ResolventScan& s, double lo, double hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.flagged[i] || !std::isfinite(s.norms[i]) || !(s.norms[i] > 0.0)) continue;
    if (s.omegas[i] < lo || s.omegas[i] > hi) continue;
    x.push_back(std::log(s.omegas[i]));
    y.push_back(std::log(s.norms[i]));
  }
  if (x.size() < 8) {
    std::ostringstream msg;
    msg << "fit_growth: " << x.size() << " usable points in [" << lo << ", " << hi
        << "], need at least 8";
    throw InsufficientPoints(msg.str());
  }
  const LineFit f = fit_line(x, y);
  GrowthFit g;
  g.exponent = f.slope;
  g.intercept = f.intercept;
  g.residual = f.residual;
  g.window_lo = lo;
  g.window_hi = hi;
  g.points = static_cast<int>(x.size());
  return g;
}

CVector witness_state(const Generator& gen, int k, double& omega, bool& rejected) {
  if (gen.classical()) throw std::invalid_argument("witness_state: needs the augmented generator");
  check_augmented_eta(gen, "witness_state");
  const Grid1D& grid = gen.grid();
  const spatial::Vector mode = spatial::continuum_mode(k, grid);
  omega = std::sqrt(spatial::laplacian_eigenvalue(k, grid));
  const spatial::Vector bv = gen.Bstar() * mode;
  rejected = std::sqrt(gen.mu()) * bv.norm() <= 1e-10;

  const int n = gen.n(), m = gen.m();
  CVector x = CVector::Zero(gen.dim());
  x.head(n) = mode.cast<cplx>() / cplx(0.0, omega);
  x.segment(n, n) = mode.cast<cplx>();
  if (!rejected) {
    for (int j = 0; j < gen.n_xi(); ++j)
      x.segment(2 * n + j * m, m) =
          (gen.coupling(j) / cplx(gen.relaxation(j), omega)) * bv.cast<cplx>();
  }
  x /= gen.norm(x);
  return x;
}

std::vector<WitnessPoint> witness_sequence(const std::vector<int>& k_list, const Generator& gen) {
  std::vector<WitnessPoint> out;
  out.reserve(k_list.size());
  for (int k : k_list) {
    WitnessPoint p;
    p.k = k;
    const CVector x = witness_state(gen, k, p.omega, p.rejected);
    const CVector y = cplx(0.0, p.omega) * x - gen.apply(x);
    p.ratio = gen.norm(y) / gen.norm(x);
    if (p.rejected) p.residual = p.ratio;
    out.push_back(p);
  }
  return out;
}

std::string to_string(DecayModel m) {
  switch (m) {
    case DecayModel::Polynomial: return "polynomial";
    case DecayModel::Logarithmic: return "logarithmic";
    case DecayModel::Exponential: return "exponential";
  }
  return "polynomial";
}

DecayPrediction predict_decay(double alpha, double ell) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("predict_decay: alpha must lie in (0, 1)");
  if (!(1.0 - alpha + ell > 0.0)) throw std::domain_error("predict_decay: need 1 - alpha + ell > 0");
  return {DecayModel::Polynomial, 2.0 / (1.0 - alpha + ell)};
}

DecayPrediction predict_decay_logarithmic(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("predict_decay: alpha must lie in (0, 1)");
  return {DecayModel::Logarithmic, 1.0};
}

ClassicalGrowth classify_growth(const ResolventScan& classical, double lo, double hi) {
  const GrowthFit power = fit_growth(classical, lo, hi);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < classical.size(); ++i) {
    if (classical.flagged[i] || !std::isfinite(classical.norms[i])) continue;
    if (classical.omegas[i] < lo || classical.omegas[i] > hi) continue;
    x.push_back(classical.omegas[i]);
    y.push_back(std::log(classical.norms[i]));
  }
  const LineFit ex = fit_line(x, y);

  ClassicalGrowth g;
  g.raw_ell = power.exponent;
  g.power_residual = power.residual;
  g.K = ex.slope;
  g.exp_residual = ex.residual;
  g.exponential = g.raw_ell > kEllSnap && ex.slope > 0.0 && ex.residual < 0.5 * power.residual;
  g.ell = g.raw_ell > kEllSnap ? g.raw_ell : 0.0;
  return g;
}

DecayPrediction predict_decay(double alpha, const ClassicalGrowth& growth) {
  return growth.exponential ? predict_decay_logarithmic(alpha) : predict_decay(alpha, growth.ell);
}

}  // namespace fracdamp::resolvent
