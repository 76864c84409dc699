#pragma once

// Finite-difference Dirichlet Laplacian on (0, 1) and the three damping
// couplings B, B*: internal, Kelvin-Voigt and pointwise.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <string>
#include <variant>

namespace fracdamp::spatial {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Interior points x_i = i h, i = 1..n, with h = 1 / (n + 1).
class Grid1D {
 public:
  explicit Grid1D(int n);

  int n() const { return n_; }
  double h() const { return h_; }
  double x(int i) const { return static_cast<double>(i) * h_; }  ///< 1-based interior index

 private:
  int n_;
  double h_;
};

enum class ProfileShape {
  Constant,  ///< a0 on [lo, hi], zero elsewhere
  Smooth,    ///< a0 on [lo, hi], quintic ramps to zero over a width `ramp`
};

/// Built-in damping coefficient profiles.
struct ProfileSpec {
  ProfileShape shape = ProfileShape::Smooth;
  double lo = 0.3;
  double hi = 0.7;
  double a0 = 1.0;
  double ramp = 0.1;

  double operator()(double x) const;
};

struct Internal {
  Vector a;  ///< a(x_i), i = 1..n
  double lo = 0.0, hi = 1.0, a0 = 0.0;  ///< a >= a0 on [lo, hi]
};

struct KelvinVoigt {
  Vector a;  ///< a at midpoints (i + 1/2) h, i = 0..n
  double lo = 0.0, hi = 1.0, a0 = 0.0;
};

struct Pointwise {
  double zeta = 0.5;
};

/// No damping at all (B = 0); used for conservation checks.
struct Undamped {};

using DampingConfig = std::variant<Internal, KelvinVoigt, Pointwise, Undamped>;

std::string kind_name(const DampingConfig& config);

Internal make_internal(const Grid1D& grid, const ProfileSpec& profile);
KelvinVoigt make_kelvin_voigt(const Grid1D& grid, const ProfileSpec& profile);
Pointwise make_pointwise(double zeta);

/// Checks the config invariants against the grid; throws std::invalid_argument.
void validate(const DampingConfig& config, const Grid1D& grid);

/// Dimension m of the discrete control space.
int control_dim(const DampingConfig& config, const Grid1D& grid);

/// Weight of the control-space inner product: h for distributed couplings,
/// 1 for the scalar pointwise control.
double control_weight(const DampingConfig& config, const Grid1D& grid);

/// (1 / h^2) tridiag(-1, 2, -1).
SparseMatrix laplacian_dirichlet(const Grid1D& grid);

/// Eigenvalue (4 / h^2) sin^2(k pi h / 2) of the stencil.
double laplacian_eigenvalue(int k, const Grid1D& grid);

/// sqrt(2) sin(k pi x_i): unit norm in the h-weighted inner product.
Vector continuum_mode(int k, const Grid1D& grid);

/// B* as an m x n matrix.
SparseMatrix bstar_matrix(const DampingConfig& config, const Grid1D& grid);

/// B as an n x m matrix, the adjoint of B* for <.,.>_h on the grid and the
/// control inner product on the m-space.
SparseMatrix b_matrix(const DampingConfig& config, const Grid1D& grid);

/// BB* as an n x n symmetric positive semidefinite matrix.
SparseMatrix bbstar_matrix(const DampingConfig& config, const Grid1D& grid);

Vector apply_Bstar(const DampingConfig& config, const Grid1D& grid, const Vector& v);
Vector apply_B(const DampingConfig& config, const Grid1D& grid, const Vector& w);

/// h-weighted inner product on the grid.
inline double inner_h(const Grid1D& grid, const Vector& a, const Vector& b) {
  return grid.h() * a.dot(b);
}

}  // namespace fracdamp::spatial
