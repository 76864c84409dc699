#pragma once

// Decay-law fits of energy traces and their comparison with predicted rates.

#include "fracdamp/augmented.hpp"
#include "fracdamp/resolvent.hpp"

#include <limits>
#include <span>
#include <string>

namespace fracdamp::decay {

using augmented::EnergyRecord;
using resolvent::DecayModel;
using resolvent::DecayPrediction;

/// Normalized goodness below which a fit with positive rate is accepted.
inline constexpr double kAcceptGoodness = 0.05;

struct DecayFit {
  DecayModel model = DecayModel::Polynomial;
  double rate = 0.0;
  double intercept = 0.0;
  /// RMS residual of log E divided by the fitted drop of log E over the window.
  double goodness = 0.0;
  double residual = 0.0;    ///< RMS residual of log E
  double confidence = 0.0;  ///< two standard errors of the rate
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 0;
  bool accepted = false;
};

/// Raised for nonpositive energies or windows shorter than a decade.
class DecayError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pass t_min < 0 for the default T / 10 and t_max = inf for the trace end.
DecayFit fit_polynomial_rate(std::span<const EnergyRecord> trace, double t_min = -1.0,
                             double t_max = std::numeric_limits<double>::infinity());
DecayFit fit_exponential_rate(std::span<const EnergyRecord> trace, double t_min = -1.0,
                              double t_max = std::numeric_limits<double>::infinity());

struct Verdict {
  DecayModel fit_model = DecayModel::Polynomial;
  DecayModel predicted_model = DecayModel::Polynomial;
  double rate = 0.0;
  double predicted = 0.0;
  double deviation = 0.0;  ///< |rate - predicted| / predicted
  double tol = 0.0;
  bool mismatch = false;   ///< fit and prediction use different models
  bool pass = false;
  std::string note;
};

Verdict compare_to_prediction(const DecayFit& fit, const DecayPrediction& predicted, double tol);

/// E strictly decreasing across every record with t in [t_min, t_max].
bool strictly_decreasing(std::span<const EnergyRecord> trace, double t_min = 0.0,
                         double t_max = std::numeric_limits<double>::infinity());

}  // namespace fracdamp::decay
