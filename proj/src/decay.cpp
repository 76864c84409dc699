#include "fracdamp/decay.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace fracdamp::decay {

namespace {

struct Window {
  std::vector<double> t;
  std::vector<double> logE;
  double lo = 0.0;
  double hi = 0.0;
};

Window collect(std::span<const EnergyRecord> trace, double t_min, double t_max, const char* op) {
  if (trace.empty()) throw DecayError(std::string(op) + ": empty trace");
  const double T = trace.back().t;
  if (t_min < 0.0) t_min = T / 10.0;
  if (!std::isfinite(t_max) || t_max > T) t_max = T;
  const double span = t_min > 0.0 ? std::log10(t_max / t_min) : std::log10(1.0 + t_max);
  if (!(t_max > t_min) || span < 1.0 - 1e-12) {
    std::ostringstream msg;
    msg << op << ": window [" << t_min << ", " << t_max << "] spans less than one decade";
    throw DecayError(msg.str());
  }
  Window w;
  w.lo = t_min;
  w.hi = t_max;
  for (const auto& r : trace) {
    if (r.t < t_min || r.t > t_max) continue;
    if (!(r.E > 0.0) || !std::isfinite(r.E)) {
      std::ostringstream msg;
      msg << op << ": nonpositive energy " << r.E << " at t = " << r.t;
      throw DecayError(msg.str());
    }
    w.t.push_back(r.t);
    w.logE.push_back(std::log(r.E));
  }
  if (w.t.size() < 3) throw DecayError(std::string(op) + ": fewer than 3 records in the window");
  return w;
}

DecayFit finish(DecayModel model, const Window& w, const std::vector<double>& x) {
  const resolvent::LineFit f = resolvent::fit_line(x, w.logE);
  DecayFit d;
  d.model = model;
  d.rate = -f.slope;
  d.intercept = f.intercept;
  d.residual = f.residual;
  d.confidence = 2.0 * f.slope_stderr;
  const double drop = std::abs(f.slope * (x.back() - x.front()));
  d.goodness = drop > 0.0 ? f.residual / drop : std::numeric_limits<double>::infinity();
  d.t_min = w.lo;
  d.t_max = w.hi;
  d.points = static_cast<int>(x.size());
  d.accepted = d.rate > 0.0 && d.goodness < kAcceptGoodness;
  return d;
}

}  // namespace

DecayFit fit_polynomial_rate(std::span<const EnergyRecord> trace, double t_min, double t_max) {
  const Window w = collect(trace, t_min, t_max, "fit_polynomial_rate");
  std::vector<double> x(w.t.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::log1p(w.t[i]);
  return finish(DecayModel::Polynomial, w, x);
}

DecayFit fit_exponential_rate(std::span<const EnergyRecord> trace, double t_min, double t_max) {
  const Window w = collect(trace, t_min, t_max, "fit_exponential_rate");
  return finish(DecayModel::Exponential, w, w.t);
}

Verdict compare_to_prediction(const DecayFit& fit, const DecayPrediction& predicted, double tol) {
  Verdict v;
  v.fit_model = fit.model;
  v.predicted_model = predicted.model;
  v.rate = fit.rate;
  v.predicted = predicted.rate;
  v.tol = tol;
  v.deviation = predicted.rate != 0.0 ? std::abs(fit.rate - predicted.rate) / std::abs(predicted.rate)
                                      : std::numeric_limits<double>::infinity();
  v.mismatch = fit.model != predicted.model;
  if (v.mismatch) {
    v.note = "model mismatch: " + resolvent::to_string(fit.model) + " fit vs " +
             resolvent::to_string(predicted.model) + " prediction";
  } else if (!fit.accepted) {
    v.note = "fit rejected";
  }
  v.pass = !v.mismatch && fit.accepted && v.deviation <= tol;
  return v;
}

bool strictly_decreasing(std::span<const EnergyRecord> trace, double t_min, double t_max) {
  bool any = false;
  double prev = 0.0;
  for (const auto& r : trace) {
    if (r.t < t_min || r.t > t_max) continue;
    if (any && !(r.E < prev)) return false;
    prev = r.E;
    any = true;
  }
  return any;
}

}  // namespace fracdamp::decay
