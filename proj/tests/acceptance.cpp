// Acceptance run: one PASS/FAIL line per criterion, followed by the measured
// numbers. With an argument N only criterion N runs. Exit status is the
// number of failed criteria.

#include "fracdamp/augmented.hpp"
#include "fracdamp/config.hpp"
#include "fracdamp/decay.hpp"
#include "fracdamp/kernel.hpp"
#include "fracdamp/resolvent.hpp"
#include "fracdamp/spatial.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace fracdamp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& details) {
  std::printf("%s criterion %d: %s\n    %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), details.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

spatial::ProfileSpec constant_everywhere() {
  return {spatial::ProfileShape::Constant, 0.0, 1.0, 1.0, 0.0};
}

// Diffusive realization of I^{1-alpha, eta} against the direct product-integration reference.
void criterion_1() {
  const auto t0 = Clock::now();
  const double T = 10.0;
  const std::size_t steps = 1000;
  const double dt = T / steps;
  const std::vector<std::pair<std::string, std::function<double(double)>>> signals = {
      {"1", [](double) { return 1.0; }},
      {"t", [](double t) { return t; }},
      {"sin t", [](double t) { return std::sin(t); }},
      {"pulse", [](double t) { return std::exp(-(t - 3.0) * (t - 3.0)); }},
  };
  double worst_rel = 0.0, worst_ratio = 0.0;
  bool ok = true;
  for (double alpha : {0.3, 0.5, 0.7})
    for (double eta : {0.5, 1.0}) {
      const kernel::FractionalParams p(alpha, eta);
      const auto q128 = kernel::build_quadrature(p, 128);
      const auto q256 = kernel::build_quadrature(p, 256);
      for (const auto& [name, f] : signals) {
        const auto U = kernel::SampledSignal::sample(dt, steps, f);
        const auto ref = kernel::fractional_integral_direct(U, p, 1.0 - alpha);
        const auto o128 = kernel::diffusive_apply(U, q128);
        const auto o256 = kernel::diffusive_apply(U, q256);
        double e128 = 0.0, e256 = 0.0;
        for (std::size_t i = 0; i < U.size(); ++i) {
          e128 = std::max(e128, std::abs(o128.values[i] - ref.values[i]));
          e256 = std::max(e256, std::abs(o256.values[i] - ref.values[i]));
        }
        const double scale = ref.max_abs();
        worst_rel = std::max(worst_rel, e128 / scale);
        worst_ratio = std::max(worst_ratio, e256 / e128);
        if (!(e128 <= 1e-3 * scale) || !(2.0 * e256 <= e128)) {
          ok = false;
          std::printf("    alpha=%g eta=%g U=%s: err128=%.3e err256=%.3e scale=%.3e\n", alpha, eta,
                      name.c_str(), e128, e256, scale);
        }
      }
    }
  const double secs = seconds_since(t0);
  report(1, ok && secs < 10.0, "diffusive representation matches direct fractional integral",
         fmt("worst relative error %.3e (tol 1e-3), worst err256/err128 %.3f (need <= 0.5), %.2f s (limit 10 s)",
             worst_rel, worst_ratio, secs));
}

void criterion_2() {
  const auto t0 = Clock::now();
  const std::vector<double> alphas = {0.25, 0.5, 0.75}, etas = {0.5, 1.0, 2.0};
  const std::vector<double> omegas = {-100.0, -10.0, -1.0, -0.5, 0.5, 1.0, 10.0, 100.0};
  const auto rows = kernel::branch_report(alphas, etas, omegas);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max({worst, r.resolvent_error, r.squared_error});
  const double secs = seconds_since(t0);
  report(2, rows.size() == 72 && worst <= 1e-6 && secs < 5.0, "closed-form frequency integrals",
         fmt("%zu grid points, worst relative error %.3e (tol 1e-6), %.2f s (limit 5 s)", rows.size(), worst,
             secs));
}

void criterion_3() {
  const auto cfg = config::parse_config("");
  const spatial::Grid1D grid(cfg.n);
  const auto quad = kernel::build_quadrature(kernel::FractionalParams(cfg.alpha, cfg.eta), cfg.n_nodes);
  const augmented::Generator gen(grid, config::make_damping(cfg, grid), quad);
  const double dt = 0.01;
  const augmented::Stepper stepper(gen, dt);
  auto x = config::make_initial(cfg, gen);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    augmented::AugmentedState mid;
    const auto next = stepper.step(x, mid);
    const double e0 = augmented::energy(x, gen).E;
    const double e1 = augmented::energy(next, gen).E;
    const double d = augmented::energy(mid, gen).dissipation;
    worst = std::max(worst, std::abs(e1 - e0 - dt * d) / e0);
    x = next;
  }

  const augmented::Generator free(grid, spatial::Undamped{}, quad);
  const augmented::Stepper free_stepper(free, dt);
  auto y = config::make_initial(cfg, free);
  const double E0 = augmented::energy(y, free).E;
  double drift = 0.0;
  for (int k = 0; k < 10000; ++k) {
    y = free_stepper.step(y);
    drift = std::max(drift, std::abs(augmented::energy(y, free).E - E0) / E0);
  }
  report(3, worst <= 1e-12 && drift <= 1e-12, "discrete energy law of the implicit midpoint scheme",
         fmt("worst per-step relative defect %.3e over 10000 steps, undamped drift %.3e (tol 1e-12)", worst,
             drift));
}

double energy_ratio(const spatial::DampingConfig& damping, double T, double& E0) {
  const spatial::Grid1D grid(200);
  const auto quad = kernel::build_quadrature(kernel::FractionalParams(0.5, 1.0), 128);
  const augmented::Generator gen(grid, damping, quad);
  augmented::SimulationOptions opts;
  opts.T = T;
  opts.dt = 0.01;
  opts.record_every = 1000;
  opts.higher_energy = false;
  const auto traj = augmented::simulate(augmented::modal_state(gen, {2}, {1.0}), gen, opts);
  E0 = traj.records.front().E;
  return traj.records.back().E / E0;
}

void criterion_4() {
  const spatial::Grid1D grid(200);
  double E0 = 0.0;
  const double conserved = energy_ratio(spatial::make_pointwise(0.5), 100.0, E0);
  const double irrational = energy_ratio(spatial::make_pointwise(1.0 / std::numbers::sqrt2), 200.0, E0);
  const double internal = energy_ratio(spatial::make_internal(grid, {}), 200.0, E0);
  const bool ok = std::abs(conserved - 1.0) <= 1e-10 && irrational <= 0.5 && internal <= 0.5;
  report(4, ok, "strong-stability dichotomy for pointwise and internal damping",
         fmt("zeta=1/2 mode 2: |E(100)/E(0) - 1| = %.3e (tol 1e-10); zeta=1/sqrt2: E(200)/E(0) = %.3e; "
             "internal: E(200)/E(0) = %.3e (need <= 0.5)",
             std::abs(conserved - 1.0), irrational, internal));
}

void criterion_5() {
  const auto t0 = Clock::now();
  const spatial::Grid1D grid(200);
  const auto damping = spatial::make_internal(grid, {});
  const double lo = 2.0 * std::numbers::pi, hi = resolvent::nyquist(grid) / 4.0;
  const auto omegas = resolvent::modal_band(grid, lo, hi, 64);
  bool ok = true;
  std::string details;
  for (double alpha : {0.3, 0.5, 0.7}) {
    const auto quad = kernel::build_quadrature(kernel::FractionalParams(alpha, 1.0), 64);
    const augmented::Generator gen(grid, damping, quad);
    const auto fit = resolvent::fit_growth(resolvent::scan(gen, omegas), lo, hi);
    ok = ok && std::abs(fit.exponent - (1.0 - alpha)) <= 0.15;
    details += fmt("alpha=%.1f exponent %.3f (target %.1f +- 0.15); ", alpha, fit.exponent, 1.0 - alpha);
  }
  const auto classical = resolvent::assemble_classical(grid, damping);
  const auto cfit = resolvent::fit_growth(resolvent::scan(classical, omegas), lo, hi);
  ok = ok && std::abs(cfit.exponent) <= 0.1;
  const double secs = seconds_since(t0);
  details += fmt("classical exponent %.3f (need [-0.1, 0.1]); %zu frequencies; %.1f s (limit 300 s)",
                 cfit.exponent, omegas.size(), secs);
  report(5, ok && secs < 300.0, "resolvent growth exponents on the imaginary axis", details);
}

void criterion_6() {
  const spatial::Grid1D grid(200);
  const auto damping = spatial::make_internal(grid, constant_everywhere());
  std::vector<int> ks;
  for (int k = 4; k <= 32; ++k) ks.push_back(k);
  bool ok = true;
  std::string details;
  for (double alpha : {0.3, 0.5, 0.7}) {
    const auto quad = kernel::build_quadrature(kernel::FractionalParams(alpha, 1.0), 128);
    const augmented::Generator gen(grid, damping, quad);
    const auto seq = resolvent::witness_sequence(ks, gen);
    std::vector<double> scaled;
    for (const auto& w : seq) scaled.push_back(w.ratio * std::pow(w.omega, 1.0 - alpha));
    double mean = 0.0;
    for (double s : scaled) mean += s;
    mean /= static_cast<double>(scaled.size());
    double spread = 0.0;
    for (double s : scaled) spread = std::max(spread, std::abs(s / mean - 1.0));
    ok = ok && spread <= 0.2;
    details += fmt("alpha=%.1f max deviation %.3f; ", alpha, spread);
  }
  details += "tol 0.2 over k = 4..32";
  report(6, ok, "witness sequence ratio scales like omega^(alpha-1)", details);
}

struct DecayRun {
  decay::DecayFit poly;
  decay::DecayFit expo;
  bool decreasing = false;
};

DecayRun decay_run(const config::RunConfig& cfg) {
  const spatial::Grid1D grid(cfg.n);
  const auto quad = kernel::build_quadrature(kernel::FractionalParams(cfg.alpha, cfg.eta), cfg.n_nodes,
                                             cfg.xi_max, cfg.quadrature_strategy(), cfg.certificate_tol);
  const augmented::Generator gen(grid, config::make_damping(cfg, grid), quad);
  augmented::SimulationOptions opts;
  opts.T = cfg.T;
  opts.dt = cfg.dt;
  opts.record_every = cfg.record_every;
  opts.higher_energy = false;
  const auto traj = augmented::simulate(config::make_initial(cfg, gen), gen, opts);
  DecayRun r;
  r.poly = decay::fit_polynomial_rate(traj.records, cfg.t_min, cfg.t_max);
  r.expo = decay::fit_exponential_rate(traj.records, cfg.t_min, cfg.t_max);
  r.decreasing = decay::strictly_decreasing(traj.records, cfg.t_min, cfg.t_max);
  return r;
}

double criterion_7() {
  const auto t0 = Clock::now();
  const auto half = decay_run(config::parse_config(""));
  const auto seven = decay_run(config::parse_config("[params]\nalpha = 0.7\n"));
  const double secs = seconds_since(t0);
  const double predicted = resolvent::predict_decay(0.5, 0.0).rate;
  const double deviation = std::abs(half.poly.rate - predicted) / predicted;
  const bool ok = half.poly.accepted && deviation <= 0.2 && seven.poly.rate > half.poly.rate && secs < 600.0;
  report(7, ok, "polynomial energy decay rate for internal damping",
         fmt("alpha=0.5 rate %.3f vs %.1f (deviation %.3f, tol 0.2, goodness %.4f); alpha=0.7 rate %.3f "
             "(must exceed alpha=0.5); %.1f s (limit 600 s)",
             half.poly.rate, predicted, deviation, half.poly.goodness, seven.poly.rate, secs));
  return half.poly.residual;
}

void criterion_8(double reference_residual) {
  // Same setup as criterion 7 with Kelvin-Voigt instead of internal damping.
  const auto kv = decay_run(config::parse_config("[damping]\nkind = kelvin_voigt\n"));
  const double need = 3.0 * reference_residual;
  const bool ok = kv.decreasing && kv.poly.residual >= need && kv.expo.residual >= need;
  report(8, ok, "Kelvin-Voigt energy decays without a polynomial or exponential law",
         fmt("strictly decreasing: %s; polynomial residual %.4f, exponential residual %.4f (need >= %.4f, "
             "3x the internal-damping polynomial residual); fitted rates %.3f and %.4f",
             kv.decreasing ? "yes" : "no", kv.poly.residual, kv.expo.residual, need, kv.poly.rate,
             kv.expo.rate));
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  if (only < 0 || only > 8) {
    std::fprintf(stderr, "usage: %s [criterion 1..8]\n", argv[0]);
    return 64;
  }
  const auto want = [&](int id) { return only == 0 || only == id; };
  if (want(1)) criterion_1();
  if (want(2)) criterion_2();
  if (want(3)) criterion_3();
  if (want(4)) criterion_4();
  if (want(5)) criterion_5();
  if (want(6)) criterion_6();
  if (want(7) || want(8)) {
    const double residual = want(7) ? criterion_7() : decay_run(config::parse_config("")).poly.residual;
    if (want(8)) criterion_8(residual);
  }
  if (only == 0) std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
