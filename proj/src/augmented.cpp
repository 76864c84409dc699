#include "fracdamp/augmented.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fracdamp::augmented {

namespace {

using Triplet = Eigen::Triplet<double>;
using CSparse = Eigen::SparseMatrix<cplx>;

CVector mul(const SparseMatrix& M, const CVector& x) {
  const Vector re = M * x.real();
  const Vector im = M * x.imag();
  CVector out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

AugmentedState AugmentedState::zero(int n, int m, int n_xi) {
  AugmentedState s;
  s.u = Vector::Zero(n);
  s.v = Vector::Zero(n);
  s.phi = Matrix::Zero(m, n_xi);
  return s;
}

bool AugmentedState::finite() const {
  return u.allFinite() && v.allFinite() && phi.allFinite() && std::isfinite(t);
}

Generator::Generator(const Grid1D& grid, DampingConfig config, const DiffusiveQuadrature& quad)
    : grid_(grid),
      config_(std::move(config)),
      classical_(false),
      n_(grid.n()),
      m_(spatial::control_dim(config_, grid)),
      h_(grid.h()),
      mu_(spatial::control_weight(config_, grid)),
      gamma_(quad.gamma()),
      eta_(quad.eta()) {
  spatial::validate(config_, grid_);
  const auto nodes = quad.size();
  weight_.resize(nodes);
  coupling_.resize(nodes);
  relaxation_.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    weight_[j] = quad.full_weight(j);
    coupling_[j] = quad.coupling(j);
    relaxation_[j] = quad.relaxation(j);
  }
  build_matrices();
}

Generator::Generator(const Grid1D& grid, DampingConfig config)
    : grid_(grid),
      config_(std::move(config)),
      classical_(true),
      n_(grid.n()),
      m_(spatial::control_dim(config_, grid)),
      h_(grid.h()),
      mu_(spatial::control_weight(config_, grid)) {
  spatial::validate(config_, grid_);
  build_matrices();
}

void Generator::build_matrices() {
  A_ = spatial::laplacian_dirichlet(grid_);
  Bs_ = spatial::bstar_matrix(config_, grid_);
  B_ = spatial::b_matrix(config_, grid_);
  G_ = spatial::bbstar_matrix(config_, grid_);

  const int N = dim();
  const int nx = n_xi();
  std::vector<Triplet> t;
  std::vector<Triplet> w;
  std::vector<Triplet> d;
  t.reserve(3 * n_ + A_.nonZeros() + 2 * nx * (B_.nonZeros() + m_) + G_.nonZeros());

  for (int i = 0; i < n_; ++i) t.emplace_back(i, n_ + i, 1.0);
  for (int k = 0; k < A_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A_, k); it; ++it) {
      t.emplace_back(n_ + it.row(), it.col(), -it.value());
      w.emplace_back(it.row(), it.col(), h_ * it.value());
    }
  for (int i = 0; i < n_; ++i) w.emplace_back(n_ + i, n_ + i, h_);

  if (classical_) {
    for (int k = 0; k < G_.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(G_, k); it; ++it) {
        t.emplace_back(n_ + it.row(), n_ + it.col(), -it.value());
        d.emplace_back(n_ + it.row(), n_ + it.col(), -it.value());
      }
  } else {
    for (int j = 0; j < nx; ++j) {
      const int base = 2 * n_ + j * m_;
      const double cv = -gamma_ * weight_[j] * coupling_[j];
      for (int k = 0; k < B_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(B_, k); it; ++it)
          t.emplace_back(n_ + it.row(), base + it.col(), cv * it.value());
      for (int k = 0; k < Bs_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(Bs_, k); it; ++it)
          t.emplace_back(base + it.row(), n_ + it.col(), coupling_[j] * it.value());
      for (int i = 0; i < m_; ++i) {
        t.emplace_back(base + i, base + i, -relaxation_[j]);
        d.emplace_back(base + i, base + i, -relaxation_[j]);
        w.emplace_back(base + i, base + i, gamma_ * weight_[j] * mu_);
      }
    }
  }
  matrix_.resize(N, N);
  matrix_.setFromTriplets(t.begin(), t.end());
  metric_.resize(N, N);
  metric_.setFromTriplets(w.begin(), w.end());
  dissipative_.resize(N, N);
  dissipative_.setFromTriplets(d.begin(), d.end());
}

AugmentedState Generator::apply(const AugmentedState& x) const {
  require(x.u.size() == n_ && x.v.size() == n_, "Generator::apply: wrong (u, v) size");
  AugmentedState y;
  y.t = x.t;
  y.u = x.v;
  y.v = -(A_ * x.u);
  if (classical_) {
    y.v -= G_ * x.v;
    y.phi = Matrix::Zero(m_, 0);
    return y;
  }
  require(x.phi.rows() == m_ && x.phi.cols() == n_xi(), "Generator::apply: wrong phi shape");
  Vector wp(n_xi());
  for (int j = 0; j < n_xi(); ++j) wp(j) = weight_[j] * coupling_[j];
  if (m_ > 0) y.v -= gamma_ * (B_ * (x.phi * wp));
  const Vector bv = Bs_ * x.v;
  y.phi.resize(m_, n_xi());
  for (int j = 0; j < n_xi(); ++j)
    y.phi.col(j) = coupling_[j] * bv - relaxation_[j] * x.phi.col(j);
  return y;
}

CVector Generator::apply(const CVector& x) const {
  require(x.size() == dim(), "Generator::apply: wrong vector size");
  return mul(matrix_, x);
}

CVector Generator::apply_adjoint(const CVector& x) const {
  require(x.size() == dim(), "Generator::apply_adjoint: wrong vector size");
  return 2.0 * mul(dissipative_, x) - mul(matrix_, x);
}

CVector Generator::solve_shifted(cplx z, const CVector& y, int s) const {
  require(y.size() == dim(), "Generator::solve_shifted: wrong vector size");
  require(z != cplx(0.0), "Generator::solve_shifted: z must be nonzero");
  require(s == 1 || s == -1, "Generator::solve_shifted: s must be +1 or -1");
  const double sd = static_cast<double>(s);
  const CVector f = y.head(n_);
  const CVector g = y.segment(n_, n_);

  CVector rhs = z * g - mul(A_, f);
  cplx beta = sd;
  CVector acc = CVector::Zero(m_);
  if (!classical_) {
    beta = 0.0;
    for (int j = 0; j < n_xi(); ++j) {
      const cplx d = z + sd * relaxation_[j];
      beta += weight_[j] * coupling_[j] * coupling_[j] / d;
      acc += (weight_[j] * coupling_[j] / d) * y.segment(2 * n_ + j * m_, m_);
    }
    beta *= gamma_;
    if (m_ > 0) rhs -= z * gamma_ * mul(B_, acc);
  }

  CSparse K = A_.cast<cplx>() + (z * beta) * G_.cast<cplx>();
  for (int i = 0; i < n_; ++i) K.coeffRef(i, i) += z * z;
  K.makeCompressed();
  Eigen::SparseLU<CSparse> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("Generator::solve_shifted: reduced matrix is singular");
  const CVector v = lu.solve(rhs);
  if (!v.allFinite()) throw std::runtime_error("Generator::solve_shifted: non-finite solution");

  CVector x(dim());
  x.head(n_) = (f + v) / z;
  x.segment(n_, n_) = v;
  if (!classical_) {
    const CVector bv = mul(Bs_, v);
    for (int j = 0; j < n_xi(); ++j) {
      const cplx d = z + sd * relaxation_[j];
      x.segment(2 * n_ + j * m_, m_) = (y.segment(2 * n_ + j * m_, m_) + coupling_[j] * bv) / d;
    }
  }
  return x;
}

cplx Generator::inner(const CVector& x, const CVector& y) const {
  return y.dot(mul(metric_, x));
}

double Generator::norm(const CVector& x) const {
  return std::sqrt(std::max(0.0, inner(x, x).real()));
}

CVector Generator::flatten(const AugmentedState& x) const {
  CVector out = CVector::Zero(dim());
  out.head(n_) = x.u.cast<cplx>();
  out.segment(n_, n_) = x.v.cast<cplx>();
  if (!classical_ && m_ > 0)
    out.tail(m_ * n_xi()) = Eigen::Map<const Vector>(x.phi.data(), m_ * n_xi()).cast<cplx>();
  return out;
}

AugmentedState Generator::unflatten(const Vector& x) const {
  require(x.size() == dim(), "Generator::unflatten: wrong vector size");
  AugmentedState s;
  s.u = x.head(n_);
  s.v = x.segment(n_, n_);
  s.phi = Matrix::Zero(m_, classical_ ? 0 : n_xi());
  if (!classical_ && m_ > 0)
    s.phi = Eigen::Map<const Matrix>(x.data() + 2 * n_, m_, n_xi());
  return s;
}

double a_energy(const Grid1D& grid, const Vector& u) {
  const int n = grid.n();
  double sum = 0.0;
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = u(i) - prev;
    sum += d * d;
    prev = u(i);
  }
  sum += prev * prev;
  return sum / grid.h();
}

EnergyRecord energy(const AugmentedState& x, const Generator& gen) {
  require(x.u.size() == gen.n() && x.v.size() == gen.n(), "energy: wrong (u, v) size");
  EnergyRecord r;
  r.t = x.t;
  r.E1 = 0.5 * (a_energy(gen.grid(), x.u) + gen.h() * x.v.squaredNorm());
  if (gen.classical()) {
    const Vector bv = gen.Bstar() * x.v;
    r.dissipation = -gen.mu() * bv.squaredNorm();
  } else {
    require(x.phi.rows() == gen.m() && x.phi.cols() == gen.n_xi(), "energy: wrong phi shape");
    double e2 = 0.0;
    double diss = 0.0;
    for (int j = 0; j < gen.n_xi(); ++j) {
      const double q = gen.weight(j) * x.phi.col(j).squaredNorm();
      e2 += q;
      diss += gen.relaxation(j) * q;
    }
    r.E2 = 0.5 * gen.gamma() * gen.mu() * e2;
    r.dissipation = -gen.gamma() * gen.mu() * diss;
  }
  r.E = r.E1 + r.E2;
  return r;
}

double higher_energy(const AugmentedState& x, const Generator& gen) {
  return energy(gen.apply(x), gen).E;
}

Stepper::Stepper(const Generator& gen, double dt) : gen_(gen), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("Stepper: dt must be > 0");
  double sigma = 1.0;
  if (!gen.classical()) {
    sigma = 0.0;
    denom_.resize(gen.n_xi());
    for (int j = 0; j < gen.n_xi(); ++j) {
      denom_[j] = 2.0 + dt * gen.relaxation(j);
      sigma += gen.weight(j) * gen.coupling(j) * gen.coupling(j) * dt / denom_[j];
    }
    sigma *= gen.gamma();
  }
  SparseMatrix K = (0.25 * dt * dt) * gen.A() + (0.5 * dt * sigma) * gen.G();
  SparseMatrix I(gen.n(), gen.n());
  I.setIdentity();
  K += I;
  K_ = K;
  solver_.compute(K_);
  if (solver_.info() != Eigen::Success)
    throw std::runtime_error("Stepper: reduced matrix factorization failed");
}

AugmentedState Stepper::step(const AugmentedState& x) const {
  AugmentedState mid;
  return step(x, mid);
}

AugmentedState Stepper::step(const AugmentedState& x, AugmentedState& mid) const {
  const Generator& g = gen_;
  const int m = g.m();
  const int nx = g.classical() ? 0 : g.n_xi();
  require(x.u.size() == g.n() && x.v.size() == g.n(), "Stepper::step: wrong (u, v) size");
  if (!g.classical())
    require(x.phi.rows() == m && x.phi.cols() == nx, "Stepper::step: wrong phi shape");

  Vector rhs = x.v - (0.5 * dt_) * (g.A() * x.u);
  if (nx > 0 && m > 0) {
    Vector acc = Vector::Zero(m);
    for (int j = 0; j < nx; ++j)
      acc += (g.weight(j) * g.coupling(j) * 2.0 / denom_[j]) * x.phi.col(j);
    rhs -= (0.5 * dt_ * g.gamma()) * (g.B() * acc);
  }
  Vector vbar = solver_.solve(rhs);
  if (solver_.info() != Eigen::Success || !vbar.allFinite())
    throw std::runtime_error("Stepper::step: reduced solve failed");
  // One sweep of iterative refinement keeps long-run energy drift at roundoff.
  vbar += solver_.solve(rhs - K_ * vbar);

  mid.t = x.t + 0.5 * dt_;
  mid.v = vbar;
  mid.u = x.u + (0.5 * dt_) * vbar;
  mid.phi.resize(m, nx);
  if (nx > 0 && m > 0) {
    const Vector bv = g.Bstar() * vbar;
    for (int j = 0; j < nx; ++j)
      mid.phi.col(j) = (2.0 * x.phi.col(j) + (dt_ * g.coupling(j)) * bv) / denom_[j];
  }

  AugmentedState next;
  next.t = x.t + dt_;
  next.u = x.u + dt_ * vbar;
  next.v = 2.0 * vbar - x.v;
  next.phi = 2.0 * mid.phi - x.phi;
  return next;
}

Trajectory simulate(const AugmentedState& init, const Generator& gen,
                    const SimulationOptions& options) {
  require(options.T > 0.0 && std::isfinite(options.T), "simulate: T must be > 0");
  require(options.dt > 0.0 && std::isfinite(options.dt), "simulate: dt must be > 0");
  require(options.record_every >= 1, "simulate: record_every must be >= 1");
  require(init.finite(), "simulate: initial state has non-finite entries");
  if (!gen.classical() && !options.allow_nonzero_phi && init.phi.size() > 0 &&
      init.phi.cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument(
        "simulate: initial phi must be zero (set allow_nonzero_phi for extended data)");

  const double ratio = options.T / options.dt;
  const int steps = static_cast<int>(std::ceil(ratio - 1e-9));
  const double dt = options.T / steps;
  Stepper stepper(gen, dt);

  auto record = [&](const AugmentedState& s) {
    EnergyRecord r = energy(s, gen);
    if (options.higher_energy) r.hoE = higher_energy(s, gen);
    return r;
  };

  Trajectory traj;
  AugmentedState x = init;
  x.t = 0.0;
  if (gen.classical()) x.phi = Matrix::Zero(gen.m(), 0);
  traj.records.push_back(record(x));
  for (int k = 1; k <= steps; ++k) {
    x = stepper.step(x);
    if (k == steps) x.t = options.T;
    if (k % options.record_every == 0 || k == steps) traj.records.push_back(record(x));
  }
  if (!x.finite()) throw std::runtime_error("simulate: state became non-finite");
  traj.final_state = std::move(x);
  traj.steps = steps;
  return traj;
}

AugmentedState modal_state(const Generator& gen, const std::vector<int>& modes,
                           const std::vector<double>& coefficients) {
  require(modes.size() == coefficients.size(), "modal_state: modes/coefficients size mismatch");
  AugmentedState s = AugmentedState::zero(gen.n(), gen.m(), gen.classical() ? 0 : gen.n_xi());
  for (std::size_t i = 0; i < modes.size(); ++i)
    s.u += coefficients[i] * spatial::continuum_mode(modes[i], gen.grid());
  return s;
}

}  // namespace fracdamp::augmented
