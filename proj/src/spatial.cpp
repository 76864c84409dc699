#include "fracdamp/spatial.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fracdamp::spatial {

namespace {

using Triplet = Eigen::Triplet<double>;

double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

template <class T>
void validate_profile(const T& c, int expected, const Grid1D& grid, const char* name,
                      bool midpoints) {
  std::ostringstream msg;
  if (c.a.size() != expected) {
    msg << name << ": coefficient has " << c.a.size() << " samples, expected " << expected;
    throw std::invalid_argument(msg.str());
  }
  if (!(c.a0 > 0.0) || !(c.lo >= 0.0 && c.lo < c.hi && c.hi <= 1.0)) {
    msg << name << ": need a0 > 0 and 0 <= lo < hi <= 1";
    throw std::invalid_argument(msg.str());
  }
  bool any = false;
  for (int i = 0; i < c.a.size(); ++i) {
    const double ai = c.a(i);
    if (!std::isfinite(ai) || ai < 0.0) {
      msg << name << ": coefficient must be finite and >= 0 (sample " << i << ")";
      throw std::invalid_argument(msg.str());
    }
    any = any || ai > 0.0;
    const double x = midpoints ? (i + 0.5) * grid.h() : (i + 1) * grid.h();
    if (x >= c.lo && x <= c.hi && ai < c.a0 * (1.0 - 1e-12)) {
      msg << name << ": coefficient drops below a0 = " << c.a0 << " at x = " << x;
      throw std::invalid_argument(msg.str());
    }
  }
  if (!any) throw std::invalid_argument(std::string(name) + ": coefficient support is empty");
}

}  // namespace

Grid1D::Grid1D(int n) : n_(n), h_(1.0 / (n + 1)) {
  if (n < 3) throw std::invalid_argument("Grid1D: need at least 3 interior points");
}

double ProfileSpec::operator()(double x) const {
  if (x >= lo && x <= hi) return a0;
  if (shape == ProfileShape::Constant || !(ramp > 0.0)) return 0.0;
  if (x < lo) return a0 * smoothstep5((x - (lo - ramp)) / ramp);
  return a0 * smoothstep5(((hi + ramp) - x) / ramp);
}

std::string kind_name(const DampingConfig& config) {
  struct {
    std::string operator()(const Internal&) const { return "internal"; }
    std::string operator()(const KelvinVoigt&) const { return "kelvin_voigt"; }
    std::string operator()(const Pointwise&) const { return "pointwise"; }
    std::string operator()(const Undamped&) const { return "none"; }
  } visitor;
  return std::visit(visitor, config);
}

Internal make_internal(const Grid1D& grid, const ProfileSpec& profile) {
  Internal c;
  c.a.resize(grid.n());
  for (int i = 0; i < grid.n(); ++i) c.a(i) = profile(grid.x(i + 1));
  c.lo = profile.lo;
  c.hi = profile.hi;
  c.a0 = profile.a0;
  validate(c, grid);
  return c;
}

KelvinVoigt make_kelvin_voigt(const Grid1D& grid, const ProfileSpec& profile) {
  KelvinVoigt c;
  c.a.resize(grid.n() + 1);
  for (int i = 0; i <= grid.n(); ++i) c.a(i) = profile((i + 0.5) * grid.h());
  c.lo = profile.lo;
  c.hi = profile.hi;
  c.a0 = profile.a0;
  validate(c, grid);
  return c;
}

Pointwise make_pointwise(double zeta) {
  Pointwise c{zeta};
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("Pointwise: zeta must lie in (0, 1)");
  return c;
}

void validate(const DampingConfig& config, const Grid1D& grid) {
  if (const auto* c = std::get_if<Internal>(&config)) {
    validate_profile(*c, grid.n(), grid, "Internal", false);
  } else if (const auto* c = std::get_if<KelvinVoigt>(&config)) {
    validate_profile(*c, grid.n() + 1, grid, "KelvinVoigt", true);
  } else if (const auto* c = std::get_if<Pointwise>(&config)) {
    if (!(c->zeta > 0.0 && c->zeta < 1.0))
      throw std::invalid_argument("Pointwise: zeta must lie in (0, 1)");
  }
}

int control_dim(const DampingConfig& config, const Grid1D& grid) {
  if (std::holds_alternative<Internal>(config)) return grid.n();
  if (std::holds_alternative<KelvinVoigt>(config)) return grid.n() + 1;
  if (std::holds_alternative<Pointwise>(config)) return 1;
  return 0;
}

double control_weight(const DampingConfig& config, const Grid1D& grid) {
  if (std::holds_alternative<Internal>(config) || std::holds_alternative<KelvinVoigt>(config))
    return grid.h();
  return 1.0;
}

SparseMatrix laplacian_dirichlet(const Grid1D& grid) {
  const int n = grid.n();
  const double s = 1.0 / (grid.h() * grid.h());
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0 * s);
    if (i > 0) t.emplace_back(i, i - 1, -s);
    if (i + 1 < n) t.emplace_back(i, i + 1, -s);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

double laplacian_eigenvalue(int k, const Grid1D& grid) {
  const double s = std::sin(0.5 * k * std::numbers::pi * grid.h());
  return 4.0 * s * s / (grid.h() * grid.h());
}

Vector continuum_mode(int k, const Grid1D& grid) {
  if (k < 1 || k > grid.n()) {
    std::ostringstream msg;
    msg << "continuum_mode: index " << k << " outside 1.." << grid.n();
    throw std::out_of_range(msg.str());
  }
  Vector v(grid.n());
  const double c = std::sqrt(2.0);
  for (int i = 0; i < grid.n(); ++i)
    v(i) = c * std::sin(k * std::numbers::pi * grid.x(i + 1));
  return v;
}

SparseMatrix bstar_matrix(const DampingConfig& config, const Grid1D& grid) {
  const int n = grid.n();
  const int m = control_dim(config, grid);
  std::vector<Triplet> t;
  if (const auto* c = std::get_if<Internal>(&config)) {
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, std::sqrt(c->a(i)));
  } else if (const auto* c = std::get_if<KelvinVoigt>(&config)) {
    // Midpoint j sits between interior points j and j + 1 (1-based), with
    // ghost zeros at 0 and n + 1.
    const double inv_h = 1.0 / grid.h();
    for (int j = 0; j <= n; ++j) {
      const double s = std::sqrt(c->a(j)) * inv_h;
      if (s == 0.0) continue;
      if (j < n) t.emplace_back(j, j, s);
      if (j > 0) t.emplace_back(j, j - 1, -s);
    }
  } else if (const auto* c = std::get_if<Pointwise>(&config)) {
    // Linear interpolation at zeta: s = zeta (n + 1) in grid units.
    const double s = c->zeta * (n + 1);
    const int left = static_cast<int>(std::floor(s));
    const double theta = s - left;
    if (left >= 1 && left <= n && 1.0 - theta != 0.0) t.emplace_back(0, left - 1, 1.0 - theta);
    if (left + 1 >= 1 && left + 1 <= n && theta != 0.0) t.emplace_back(0, left, theta);
  }
  SparseMatrix Bs(m, n);
  Bs.setFromTriplets(t.begin(), t.end());
  return Bs;
}

SparseMatrix b_matrix(const DampingConfig& config, const Grid1D& grid) {
  // <B w, v>_h = <w, B* v>_mu  =>  B = (mu / h) (B*)^T.
  SparseMatrix B = bstar_matrix(config, grid).transpose();
  B *= control_weight(config, grid) / grid.h();
  return B;
}

SparseMatrix bbstar_matrix(const DampingConfig& config, const Grid1D& grid) {
  SparseMatrix G = b_matrix(config, grid) * bstar_matrix(config, grid);
  G.prune(0.0);
  return G;
}

Vector apply_Bstar(const DampingConfig& config, const Grid1D& grid, const Vector& v) {
  if (v.size() != grid.n()) throw std::invalid_argument("apply_Bstar: vector size mismatch");
  return bstar_matrix(config, grid) * v;
}

Vector apply_B(const DampingConfig& config, const Grid1D& grid, const Vector& w) {
  if (w.size() != control_dim(config, grid))
    throw std::invalid_argument("apply_B: control vector size mismatch");
  return b_matrix(config, grid) * w;
}

}  // namespace fracdamp::spatial
