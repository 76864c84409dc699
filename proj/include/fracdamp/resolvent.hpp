#pragma once

// Resolvent norms of the augmented and classical generators on the imaginary
// axis, growth-exponent fits, the eigenmode witness sequence, and decay-rate
// predictions derived from the classical resolvent growth.

#include "fracdamp/augmented.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdamp::resolvent {

using augmented::CVector;
using augmented::Generator;
using spatial::DampingConfig;
using spatial::Grid1D;

enum class Which { Augmented, Classical };
std::string to_string(Which w);

enum class NormBackend {
  Auto,     ///< dense for small, mildly stiff systems; Lanczos otherwise
  Dense,    ///< singular values of the metric-scaled matrix iw - A
  Lanczos,  ///< top eigenvalue of R^# R through structured solves
};
std::string to_string(NormBackend b);
NormBackend parse_backend(const std::string& name);

inline constexpr int kDenseDimLimit = 1000;

struct NormResult {
  double norm = 0.0;     ///< ||(i w - A)^{-1}|| in the metric; +inf when singular
  bool flagged = false;  ///< i w numerically in the spectrum
  NormBackend backend = NormBackend::Auto;
  int iterations = 0;
};

/// Classical generator (0 I; -A -BB*).
Generator assemble_classical(const Grid1D& grid, const DampingConfig& config);

/// Rejects eta = 0 for augmented generators (0 is then in the spectrum) and
/// omega = 0.
NormResult resolvent_norm(const Generator& gen, double omega,
                          NormBackend backend = NormBackend::Auto);

/// Singular values of W^{1/2} (i w - A) W^{-1/2}, ascending. Dense; allows
/// omega = 0 and eta = 0.
Eigen::VectorXd scaled_singular_values(const Generator& gen, double omega);

struct ResolventScan {
  Which which = Which::Augmented;
  std::vector<double> omegas;
  std::vector<double> norms;
  std::vector<bool> flagged;

  std::size_t size() const { return omegas.size(); }
};

ResolventScan scan(const Generator& gen, std::span<const double> omegas,
                   NormBackend backend = NormBackend::Auto);

/// pi / h.
double nyquist(const Grid1D& grid);

/// `points` log-spaced values on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points);

/// Log-spaced targets on [lo, hi] snapped to the nearest discrete
/// eigenfrequency sqrt(lambda_k) inside the band, duplicates removed.
std::vector<double> modal_band(const Grid1D& grid, double lo, double hi, int points);

class InsufficientPoints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS of the residuals
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct GrowthFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int points = 0;
};

/// Log-log fit over unflagged points with omega in [lo, hi]. Needs >= 8.
GrowthFit fit_growth(const ResolventScan& s, double lo, double hi);

struct WitnessPoint {
  int k = 0;
  double omega = 0.0;
  double ratio = 0.0;     ///< ||(i w_k - A) X_k|| / ||X_k||
  bool rejected = false;  ///< B* mode_k = 0: X_k is an eigenvector instead
  double residual = 0.0;  ///< ratio of the eigenvector candidate when rejected
};

/// X_k = (mode_k / (i w_k), mode_k, p_j B* mode_k / (xi_j^2 + eta + i w_k)),
/// normalized to unit metric norm; w_k = sqrt(lambda_k).
CVector witness_state(const Generator& gen, int k, double& omega, bool& rejected);

std::vector<WitnessPoint> witness_sequence(const std::vector<int>& k_list, const Generator& gen);

enum class DecayModel { Polynomial, Logarithmic, Exponential };
std::string to_string(DecayModel m);

struct DecayPrediction {
  DecayModel model = DecayModel::Polynomial;
  double rate = 0.0;  ///< r in (1+t)^-r, or k in ln^-2k(t)
};

/// Classical resolvent growth M(w) = w^ell gives energy decay (1+t)^(-2/(1-alpha+ell)).
DecayPrediction predict_decay(double alpha, double ell);
/// Classical resolvent growth M(w) = e^(K w) gives ln^-2(t) energy decay.
DecayPrediction predict_decay_logarithmic(double alpha);

struct ClassicalGrowth {
  bool exponential = false;
  double ell = 0.0;  ///< power-law exponent, snapped to 0 when |ell| <= kEllSnap
  double raw_ell = 0.0;
  double K = 0.0;    ///< rate of the exponential model
  double power_residual = 0.0;
  double exp_residual = 0.0;
};

inline constexpr double kEllSnap = 0.1;

/// Chooses between M(w) = w^ell and M(w) = e^(K w) from a classical scan.
ClassicalGrowth classify_growth(const ResolventScan& classical, double lo, double hi);

DecayPrediction predict_decay(double alpha, const ClassicalGrowth& growth);

}  // namespace fracdamp::resolvent
