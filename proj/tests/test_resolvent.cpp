#include "fracdamp/resolvent.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fracdamp;
using namespace fracdamp::resolvent;
using augmented::cplx;

namespace {

constexpr double kLooseCertificate = 1e-1;

struct Small {
  Grid1D grid{24};
  kernel::DiffusiveQuadrature quad;
  Generator gen;
  explicit Small(DampingConfig cfg, double alpha = 0.5, double eta = 1.0)
      : quad(kernel::build_quadrature(kernel::FractionalParams(alpha, eta), 16, 100.0,
                                         kernel::QuadratureStrategy::TailMapped, kLooseCertificate)),
        gen(grid, std::move(cfg), quad) {}
};

ResolventScan synthetic_scan(double exponent, int points) {
  ResolventScan s;
  s.omegas = log_grid(1.0, 1000.0, points);
  for (double w : s.omegas) {
    s.norms.push_back(3.0 * std::pow(w, exponent) * (1.0 + 0.01 * std::sin(7.0 * w)));
    s.flagged.push_back(false);
  }
  return s;
}

}  // namespace

TEST(Resolvent, BackendNames) {
  for (auto b : {NormBackend::Auto, NormBackend::Dense, NormBackend::Lanczos})
    EXPECT_EQ(parse_backend(to_string(b)), b);
  EXPECT_THROW(parse_backend("qr"), std::invalid_argument);
}

TEST(Resolvent, DenseAndLanczosAgree) {
  Small s(spatial::make_internal(Grid1D(24), {}));
  for (double w : {2.0, 15.0, 60.0}) {
    const auto d = resolvent_norm(s.gen, w, NormBackend::Dense);
    const auto l = resolvent_norm(s.gen, w, NormBackend::Lanczos);
    EXPECT_FALSE(d.flagged);
    EXPECT_FALSE(l.flagged);
    EXPECT_NEAR(l.norm / d.norm, 1.0, 1e-8) << w;
  }
}

TEST(Resolvent, ClassicalDenseAndLanczosAgree) {
  const Grid1D g(24);
  const auto gen = assemble_classical(g, spatial::make_kelvin_voigt(g, {}));
  for (double w : {3.0, 30.0}) {
    const auto d = resolvent_norm(gen, w, NormBackend::Dense);
    const auto l = resolvent_norm(gen, w, NormBackend::Lanczos);
    EXPECT_NEAR(l.norm / d.norm, 1.0, 1e-8) << w;
  }
}

TEST(Resolvent, NormIsInverseSmallestSingularValue) {
  // The norm is the inverse of the smallest scaled singular value.
  Small s(spatial::make_internal(Grid1D(24), {}));
  const auto sv = scaled_singular_values(s.gen, 10.0);
  EXPECT_NEAR(resolvent_norm(s.gen, 10.0, NormBackend::Dense).norm, 1.0 / sv[0], 1e-10 / sv[0]);
  for (int i = 1; i < sv.size(); ++i) EXPECT_LE(sv[i - 1], sv[i]);
}

TEST(Resolvent, UndampedModeIsFlagged) {
  const Grid1D g(24);
  const auto gen = assemble_classical(g, spatial::Undamped{});
  const double w = std::sqrt(spatial::laplacian_eigenvalue(3, g));
  EXPECT_TRUE(resolvent_norm(gen, w, NormBackend::Dense).flagged);
  EXPECT_TRUE(resolvent_norm(gen, w, NormBackend::Lanczos).flagged);
}

TEST(Resolvent, RejectsZeroEtaAndZeroFrequency) {
  Small zero(spatial::make_internal(Grid1D(24), {}), 0.5, 0.0);
  EXPECT_THROW(resolvent_norm(zero.gen, 3.0), std::domain_error);
  Small s(spatial::make_internal(Grid1D(24), {}));
  EXPECT_THROW(resolvent_norm(s.gen, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(scaled_singular_values(zero.gen, 0.0));
}

TEST(Resolvent, EmptyScan) {
  Small s(spatial::make_internal(Grid1D(24), {}));
  const auto r = scan(s.gen, std::vector<double>{});
  EXPECT_EQ(r.size(), 0u);
}

TEST(Resolvent, Grids) {
  const auto lg = log_grid(1.0, 100.0, 5);
  ASSERT_EQ(lg.size(), 5u);
  EXPECT_NEAR(lg[2], 10.0, 1e-12);
  const Grid1D g(200);
  EXPECT_NEAR(nyquist(g), std::numbers::pi * 201.0, 1e-9);
  const auto band = modal_band(g, 2.0 * std::numbers::pi, nyquist(g) / 4.0, 64);
  EXPECT_GT(band.size(), 20u);
  for (std::size_t i = 1; i < band.size(); ++i) EXPECT_LT(band[i - 1], band[i]);
  for (double w : band) {
    const double k = std::round(2.0 * std::asin(w * g.h() / 2.0) / (std::numbers::pi * g.h()));
    EXPECT_NEAR(w, std::sqrt(spatial::laplacian_eigenvalue(static_cast<int>(k), g)), 1e-9 * w);
  }
}

TEST(Resolvent, FitLineExact) {
  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.residual, 0.0, 1e-14);
}

TEST(Resolvent, FitGrowthRecoversExponent) {
  const auto s = synthetic_scan(0.5, 40);
  const auto f = fit_growth(s, 1.0, 1000.0);
  EXPECT_NEAR(f.exponent, 0.5, 0.01);
  EXPECT_EQ(f.points, 40);
}

TEST(Resolvent, FitGrowthSkipsFlaggedAndNeedsEightPoints) {
  auto s = synthetic_scan(0.3, 10);
  s.flagged[0] = s.flagged[1] = true;
  EXPECT_EQ(fit_growth(s, 1.0, 1000.0).points, 8);
  s.flagged[2] = true;
  EXPECT_THROW(fit_growth(s, 1.0, 1000.0), InsufficientPoints);
}

TEST(Resolvent, ClassifyGrowth) {
  const auto flat = classify_growth(synthetic_scan(0.02, 30), 1.0, 1000.0);
  EXPECT_FALSE(flat.exponential);
  EXPECT_EQ(flat.ell, 0.0);
  ResolventScan e;
  e.omegas = log_grid(1.0, 30.0, 30);
  for (double w : e.omegas) {
    e.norms.push_back(std::exp(0.2 * w));
    e.flagged.push_back(false);
  }
  const auto g = classify_growth(e, 1.0, 30.0);
  EXPECT_TRUE(g.exponential);
  EXPECT_NEAR(g.K, 0.2, 1e-6);
  EXPECT_EQ(predict_decay(0.5, g).model, DecayModel::Logarithmic);
}

TEST(Resolvent, Predictions) {
  EXPECT_DOUBLE_EQ(predict_decay(0.5, 0.0).rate, 4.0);
  EXPECT_NEAR(predict_decay(0.7, 0.0).rate, 2.0 / 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(predict_decay(0.5, 1.0).rate, 4.0 / 3.0);
  EXPECT_EQ(predict_decay(0.5, 0.0).model, DecayModel::Polynomial);
  EXPECT_EQ(predict_decay_logarithmic(0.5).model, DecayModel::Logarithmic);
  EXPECT_THROW(predict_decay(0.5, -0.6), std::domain_error);
}

TEST(Resolvent, WitnessStateHasOnlyVelocityResidual) {
  Small s(spatial::make_internal(Grid1D(24), {}));
  double w = 0.0;
  bool rejected = true;
  const CVector x = witness_state(s.gen, 3, w, rejected);
  EXPECT_FALSE(rejected);
  EXPECT_NEAR(s.gen.norm(x), 1.0, 1e-12);
  const CVector f = cplx(0.0, w) * x - s.gen.apply(x);
  const int n = s.gen.n();
  EXPECT_LT(f.head(n).norm(), 1e-10 * f.norm());
  EXPECT_LT(f.tail(s.gen.dim() - 2 * n).norm(), 1e-10 * f.norm());
  EXPECT_GT(f.segment(n, n).norm(), 0.0);
}

TEST(Resolvent, WitnessRejectedAtModeNode) {
  const Grid1D g(199);
  const auto quad = kernel::build_quadrature(kernel::FractionalParams(0.5, 1.0), 16, 100.0,
                                             kernel::QuadratureStrategy::TailMapped, kLooseCertificate);
  const Generator gen(g, spatial::make_pointwise(0.5), quad);
  const auto seq = witness_sequence({1, 2}, gen);
  ASSERT_EQ(seq.size(), 2u);
  EXPECT_FALSE(seq[0].rejected);
  EXPECT_TRUE(seq[1].rejected);
  EXPECT_LT(seq[1].residual, 1e-10);
}
