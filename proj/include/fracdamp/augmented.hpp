#pragma once

// Discrete augmented wave system over X = (u, v, phi): the generator, its
// energy metric, and an energy-exact implicit midpoint integrator.

#include "fracdamp/kernel.hpp"
#include "fracdamp/spatial.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <complex>
#include <memory>
#include <optional>
#include <vector>

namespace fracdamp::augmented {

using spatial::Grid1D;
using spatial::DampingConfig;
using spatial::SparseMatrix;
using spatial::Vector;
using kernel::DiffusiveQuadrature;
using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;

/// Displacement u, velocity v, and diffusive states phi (m x N_xi; column j
/// holds the control-space state of quadrature node j).
struct AugmentedState {
  Vector u;
  Vector v;
  Matrix phi;
  double t = 0.0;

  static AugmentedState zero(int n, int m, int n_xi);
  bool finite() const;
};

struct EnergyRecord {
  double t = 0.0;
  double E = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  double dissipation = 0.0;
  double hoE = 0.0;
};

/// The generator together with the structure needed by the stepper and the
/// resolvent solvers. Flattened vectors are ordered (u, v, phi) with phi
/// stored column-major, i.e. index 2n + j m + i for component i of node j.
///
/// Classical systems (no quadrature) have state (u, v) and generator
/// (0 I; -A -BB*).
class Generator {
 public:
  /// Augmented generator.
  Generator(const Grid1D& grid, DampingConfig config, const DiffusiveQuadrature& quad);
  /// Classical generator.
  Generator(const Grid1D& grid, DampingConfig config);

  bool classical() const { return classical_; }
  int n() const { return n_; }
  int m() const { return m_; }
  int n_xi() const { return static_cast<int>(coupling_.size()); }
  int dim() const { return 2 * n_ + m_ * n_xi(); }
  double h() const { return h_; }
  double mu() const { return mu_; }
  double gamma() const { return gamma_; }
  /// Exponential weight of the kernel; 0 for classical generators.
  double eta() const { return eta_; }
  const Grid1D& grid() const { return grid_; }
  const DampingConfig& config() const { return config_; }

  const SparseMatrix& A() const { return A_; }
  const SparseMatrix& Bstar() const { return Bs_; }
  const SparseMatrix& B() const { return B_; }
  const SparseMatrix& G() const { return G_; }

  /// Node data: full quadrature weight, p(xi_j), xi_j^2 + eta.
  double weight(int j) const { return weight_[j]; }
  double coupling(int j) const { return coupling_[j]; }
  double relaxation(int j) const { return relaxation_[j]; }

  /// Sparse generator matrix (dim x dim).
  const SparseMatrix& matrix() const { return matrix_; }
  /// Energy metric W: <X, Y>_W = Y^T W X. Block diagonal with h A on u,
  /// h I on v and gamma w_j mu I on node j.
  const SparseMatrix& metric() const { return metric_; }

  AugmentedState apply(const AugmentedState& x) const;
  CVector apply(const CVector& x) const;
  /// Metric adjoint A^# x = W^{-1} A^T W x: skew part negated, dissipative
  /// part kept.
  CVector apply_adjoint(const CVector& x) const;

  /// Solves (z I - A_s) X = Y by eliminating u and phi. s = +1 gives the
  /// generator itself; s = -1 flips the sign of the relaxation (and of the
  /// classical damping), which is what the metric adjoint needs.
  CVector solve_shifted(cplx z, const CVector& y, int s = 1) const;

  /// <x, y>_W and the induced norm, for flattened complex vectors.
  cplx inner(const CVector& x, const CVector& y) const;
  double norm(const CVector& x) const;

  CVector flatten(const AugmentedState& x) const;
  AugmentedState unflatten(const Vector& x) const;

 private:
  void build_matrices();

  Grid1D grid_;
  DampingConfig config_;
  bool classical_;
  int n_;
  int m_;
  double h_;
  double mu_;
  double gamma_ = 0.0;
  double eta_ = 0.0;
  SparseMatrix dissipative_;
  std::vector<double> weight_;
  std::vector<double> coupling_;
  std::vector<double> relaxation_;
  SparseMatrix A_, Bs_, B_, G_;
  SparseMatrix matrix_, metric_;
};

/// h-weighted A-energy h u^T A u, evaluated as a sum of squared differences.
double a_energy(const Grid1D& grid, const Vector& u);

inline Generator assemble_generator(const Grid1D& grid, const DampingConfig& config,
                                    const DiffusiveQuadrature& quad) {
  return Generator(grid, config, quad);
}

/// Energy and its dissipation rate. hoE is left at zero.
EnergyRecord energy(const AugmentedState& x, const Generator& gen);

/// Energy of A X.
double higher_energy(const AugmentedState& x, const Generator& gen);

/// Implicit midpoint stepper with the diffusive block eliminated. The reduced
/// n x n matrix depends only on dt and is factored once.
class Stepper {
 public:
  Stepper(const Generator& gen, double dt);

  double dt() const { return dt_; }
  const Generator& generator() const { return gen_; }

  AugmentedState step(const AugmentedState& x) const;
  /// Same step, also returning the midpoint state.
  AugmentedState step(const AugmentedState& x, AugmentedState& midpoint) const;

 private:
  const Generator& gen_;
  double dt_;
  std::vector<double> denom_;  ///< 2 + dt c_j
  SparseMatrix K_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
};

struct SimulationOptions {
  double T = 0.0;
  double dt = 0.0;
  int record_every = 1;
  bool higher_energy = true;
  /// Permit nonzero initial phi; the Cauchy problem has phi(0) = 0.
  bool allow_nonzero_phi = false;
};

struct Trajectory {
  std::vector<EnergyRecord> records;
  AugmentedState final_state;
  int steps = 0;
};

/// Runs ceil(T / dt) steps (dt is shrunk so the last step lands on T).
Trajectory simulate(const AugmentedState& init, const Generator& gen,
                    const SimulationOptions& options);

/// (c_1 mode_k1 + c_2 mode_k2 + ...) displacement, zero velocity and phi.
AugmentedState modal_state(const Generator& gen, const std::vector<int>& modes,
                           const std::vector<double>& coefficients);

}  // namespace fracdamp::augmented
