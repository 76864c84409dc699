#include "fracdamp/augmented.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fracdamp;
using namespace fracdamp::augmented;

namespace {

// Small rules keep the systems tiny; the identities tested here hold for any rule.
constexpr double kLooseCertificate = 1e-1;

struct Fixture {
  Grid1D grid;
  kernel::DiffusiveQuadrature quad;
  Generator gen;
  Fixture(int n, DampingConfig cfg, double alpha = 0.5, double eta = 1.0, int nodes = 32)
      : grid(n),
        quad(kernel::build_quadrature(kernel::FractionalParams(alpha, eta), nodes, kernel::kDefaultXiMax,
                                    kernel::QuadratureStrategy::TailMapped, kLooseCertificate)),
        gen(grid, std::move(cfg), quad) {}
};

CVector random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CVector x(dim);
  for (int i = 0; i < dim; ++i) x[i] = {d(rng), d(rng)};
  return x;
}

AugmentedState random_real_state(const Generator& gen, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Vector x(gen.dim());
  for (int i = 0; i < gen.dim(); ++i) x[i] = d(rng);
  return gen.unflatten(x);
}

spatial::DampingConfig internal(const Grid1D& g) { return spatial::make_internal(g, {}); }
spatial::DampingConfig kv(const Grid1D& g) { return spatial::make_kelvin_voigt(g, {}); }

}  // namespace

TEST(Augmented, Dimensions) {
  Fixture f(20, internal(Grid1D(20)), 0.5, 1.0, 16);
  EXPECT_EQ(f.gen.n(), 20);
  EXPECT_EQ(f.gen.m(), 20);
  EXPECT_EQ(f.gen.n_xi(), 16);
  EXPECT_EQ(f.gen.dim(), 40 + 20 * 16);
  EXPECT_EQ(f.gen.matrix().rows(), f.gen.dim());
  EXPECT_FALSE(f.gen.classical());
}

TEST(Augmented, FlattenRoundTrip) {
  Fixture f(12, kv(Grid1D(12)), 0.4, 0.5, 8);
  std::mt19937_64 rng(5);
  const auto s = random_real_state(f.gen, rng);
  const auto back = f.gen.unflatten(f.gen.flatten(s).real());
  EXPECT_EQ((back.u - s.u).norm(), 0.0);
  EXPECT_EQ((back.v - s.v).norm(), 0.0);
  EXPECT_EQ((back.phi - s.phi).norm(), 0.0);
}

TEST(Augmented, MatrixMatchesApply) {
  Fixture f(15, internal(Grid1D(15)), 0.3, 1.0, 12);
  std::mt19937_64 rng(9);
  const CVector x = random_state(f.gen.dim(), rng);
  const CVector a = f.gen.matrix().cast<cplx>() * x;
  EXPECT_LT((a - f.gen.apply(x)).norm(), 1e-10 * a.norm());
}

TEST(Augmented, GeneratorIsDissipative) {
  for (int kind = 0; kind < 3; ++kind) {
    const Grid1D g(30);
    const DampingConfig cfg = kind == 0 ? internal(g) : kind == 1 ? kv(g) : DampingConfig(spatial::make_pointwise(0.37));
    Fixture f(30, cfg, 0.6, 0.5, 24);
    std::mt19937_64 rng(100 + kind);
    for (int trial = 0; trial < 20; ++trial) {
      const CVector x = random_state(f.gen.dim(), rng);
      const double re = f.gen.inner(f.gen.apply(x), x).real();
      EXPECT_LE(re, 1e-12 * f.gen.norm(x) * f.gen.norm(f.gen.apply(x))) << kind;
    }
  }
}

TEST(Augmented, DissipationMatchesEnergyRate) {
  Fixture f(25, internal(Grid1D(25)), 0.5, 1.0, 20);
  std::mt19937_64 rng(21);
  const auto s = random_real_state(f.gen, rng);
  const CVector x = f.gen.flatten(s);
  const double rate = f.gen.inner(f.gen.apply(x), x).real();
  const auto rec = energy(s, f.gen);
  EXPECT_NEAR(rec.dissipation, rate, 1e-9 * std::abs(rate));
  EXPECT_NEAR(rec.E, 0.5 * f.gen.norm(x) * f.gen.norm(x), 1e-10 * rec.E);
  EXPECT_NEAR(rec.E, rec.E1 + rec.E2, 1e-12 * rec.E);
}

TEST(Augmented, MetricAdjoint) {
  Fixture f(18, kv(Grid1D(18)), 0.7, 2.0, 16);
  std::mt19937_64 rng(4);
  const CVector x = random_state(f.gen.dim(), rng);
  const CVector y = random_state(f.gen.dim(), rng);
  const cplx lhs = f.gen.inner(f.gen.apply(x), y);
  const cplx rhs = f.gen.inner(x, f.gen.apply_adjoint(y));
  EXPECT_LT(std::abs(lhs - rhs), 1e-9 * std::abs(lhs));
}

TEST(Augmented, ShiftedSolveInvertsGenerator) {
  Fixture f(20, internal(Grid1D(20)), 0.5, 1.0, 16);
  std::mt19937_64 rng(8);
  const CVector y = random_state(f.gen.dim(), rng);
  for (cplx z : {cplx(0.0, 3.0), cplx(0.0, -40.0), cplx(0.5, 12.0)}) {
    const CVector x = f.gen.solve_shifted(z, y);
    EXPECT_LT((z * x - f.gen.apply(x) - y).norm(), 1e-8 * y.norm());
    // s = -1 solves against the dissipation-flipped generator 2D - A^#
    const CVector w = f.gen.solve_shifted(z, y, -1);
    EXPECT_LT((z * w + f.gen.apply_adjoint(w) - y).norm(), 1e-8 * y.norm());
  }
}

TEST(Augmented, ClassicalGenerator) {
  const Grid1D g(20);
  Generator gen(g, internal(g));
  EXPECT_TRUE(gen.classical());
  EXPECT_EQ(gen.dim(), 40);
  std::mt19937_64 rng(13);
  const CVector x = random_state(gen.dim(), rng);
  EXPECT_LE(gen.inner(gen.apply(x), x).real(), 0.0);
  const CVector y = gen.solve_shifted(cplx(0.0, 5.0), x);
  EXPECT_LT((cplx(0.0, 5.0) * y - gen.apply(y) - x).norm(), 1e-9 * x.norm());
}

TEST(Augmented, AEnergyMatchesQuadraticForm) {
  const Grid1D g(40);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  Vector u(40);
  for (int i = 0; i < 40; ++i) u[i] = d(rng);
  const auto A = spatial::laplacian_dirichlet(g);
  EXPECT_NEAR(a_energy(g, u), g.h() * u.dot(A * u), 1e-10 * a_energy(g, u));
}

TEST(Augmented, DiscreteEnergyLawEveryStep) {
  Fixture f(60, internal(Grid1D(60)), 0.5, 1.0, 32);
  const double dt = 0.01;
  const Stepper stepper(f.gen, dt);
  auto x = modal_state(f.gen, {1, 3}, {1.0, 0.5});
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    AugmentedState mid;
    const auto next = stepper.step(x, mid);
    const double e0 = energy(x, f.gen).E, e1 = energy(next, f.gen).E;
    const double d = energy(mid, f.gen).dissipation;
    worst = std::max(worst, std::abs(e1 - e0 - dt * d) / e0);
    x = next;
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Augmented, UndampedEnergyConserved) {
  Fixture f(40, spatial::Undamped{}, 0.5, 1.0, 8);
  SimulationOptions opts{5.0, 0.01, 10, false, false};
  const auto traj = simulate(modal_state(f.gen, {1, 2, 5}, {1.0, -0.3, 0.2}), f.gen, opts);
  const double e0 = traj.records.front().E;
  for (const auto& r : traj.records) EXPECT_NEAR(r.E, e0, 1e-12 * e0);
}

TEST(Augmented, SimulationRecordsAndMonotoneEnergy) {
  Fixture f(40, internal(Grid1D(40)), 0.5, 1.0, 16);
  SimulationOptions opts{1.0, 0.03, 5, true, false};
  const auto traj = simulate(modal_state(f.gen, {1}, {1.0}), f.gen, opts);
  EXPECT_EQ(traj.steps, 34);
  EXPECT_DOUBLE_EQ(traj.records.front().t, 0.0);
  EXPECT_NEAR(traj.records.back().t, 1.0, 1e-12);
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    EXPECT_LE(traj.records[i].E, traj.records[i - 1].E);
    EXPECT_GT(traj.records[i].hoE, 0.0);
  }
}

TEST(Augmented, RejectsNonzeroInitialPhi) {
  Fixture f(10, internal(Grid1D(10)), 0.5, 1.0, 8);
  auto x = modal_state(f.gen, {1}, {1.0});
  x.phi(0, 0) = 1.0;
  SimulationOptions opts{0.1, 0.01, 1, false, false};
  EXPECT_THROW(simulate(x, f.gen, opts), std::invalid_argument);
  opts.allow_nonzero_phi = true;
  EXPECT_NO_THROW(simulate(x, f.gen, opts));
}

TEST(Augmented, PointwiseAtModeNodeConservesThatMode) {
  const Grid1D g(199);
  Fixture f(199, spatial::make_pointwise(0.5), 0.5, 1.0, 32);
  SimulationOptions opts{20.0, 0.01, 100, false, false};
  const auto traj = simulate(modal_state(f.gen, {2}, {1.0}), f.gen, opts);
  const double e0 = traj.records.front().E;
  EXPECT_NEAR(traj.records.back().E, e0, 1e-10 * e0);
}
