#include "fracdamp/commands.hpp"

#include "fracdamp/decay.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace fracdamp::commands {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[maybe_unused]] std::string num(int x) { return std::to_string(x); }
std::string num(bool x) { return x ? "1" : "0"; }
std::string num(const std::string& s) { return s; }
std::string num(const char* s) { return s; }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& hash, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# config_hash: " << hash << "\n" << header << "\n";
  }

  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << num(values), first = false), ...);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void prepare(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out.string() + ": " + ec.message());
}

void write_meta(const fs::path& out, const config::RunConfig& cfg, const std::string& command,
                const std::vector<std::string>& extra) {
  std::ofstream meta(out / "meta.ini");
  if (!meta) throw std::runtime_error("cannot write " + (out / "meta.ini").string());
  meta << "# config_hash: " << config::config_hash(cfg) << "\n# command: " << command << "\n";
  for (const auto& line : extra) meta << "# " << line << "\n";
  meta << config::canonical(cfg);
}

std::vector<std::string> certificate_lines(const kernel::DiffusiveQuadrature& q) {
  const auto& c = q.certificate();
  return {"certificate.strategy = " + kernel::to_string(q.strategy()),
          "certificate.nodes = " + std::to_string(q.size()),
          "certificate.rule_value = " + num(c.rule_value.real()) + " " + num(c.rule_value.imag()),
          "certificate.exact_value = " + num(c.exact_value.real()) + " " + num(c.exact_value.imag()),
          "certificate.relative_error = " + num(c.relative_error),
          "certificate.tolerance = " + num(c.tolerance)};
}

kernel::DiffusiveQuadrature quadrature_for(const config::RunConfig& cfg) {
  return kernel::build_quadrature(kernel::FractionalParams(cfg.alpha, cfg.eta), cfg.n_nodes, cfg.xi_max,
                                  cfg.quadrature_strategy(), cfg.certificate_tol);
}

/// Generator for the configured system: augmented, or classical when the
/// fractional term is disabled.
struct System {
  spatial::Grid1D grid;
  std::optional<kernel::DiffusiveQuadrature> quad;
  std::optional<augmented::Generator> gen;
};

System build_system(const config::RunConfig& cfg) {
  System s{spatial::Grid1D(cfg.n), std::nullopt, std::nullopt};
  const auto damping = config::make_damping(cfg, s.grid);
  if (cfg.fractional) {
    s.quad.emplace(quadrature_for(cfg));
    s.gen.emplace(s.grid, damping, *s.quad);
  } else {
    s.gen.emplace(s.grid, damping);
  }
  return s;
}

augmented::Trajectory run_simulation(const config::RunConfig& cfg, const System& sys) {
  augmented::SimulationOptions opt;
  opt.T = cfg.T;
  opt.dt = cfg.dt;
  opt.record_every = cfg.record_every;
  opt.higher_energy = cfg.higher_energy;
  return augmented::simulate(config::make_initial(cfg, *sys.gen), *sys.gen, opt);
}

void write_energy(const fs::path& path, const std::string& hash, const augmented::Trajectory& traj) {
  CsvWriter csv(path, hash, "t,E,E1,E2,dissipation,hoE");
  for (const auto& r : traj.records) csv.row(r.t, r.E, r.E1, r.E2, r.dissipation, r.hoE);
}

std::vector<double> omega_grid(const config::RunConfig& cfg, const spatial::Grid1D& grid) {
  const double hi = cfg.resolved_omega_max();
  if (cfg.spacing == "log") return resolvent::log_grid(cfg.omega_min, hi, cfg.points);
  return resolvent::modal_band(grid, cfg.omega_min, hi, cfg.points);
}

void require_positive_eta(const config::RunConfig& cfg) {
  if (cfg.fractional && !(cfg.eta > 0.0))
    throw std::domain_error(
        "resolvent: eta = 0 is rejected because 0 is then in the spectrum of the augmented "
        "generator (-A is not onto); use eta > 0");
}

}  // namespace

int cmd_verify_kernel(const config::RunConfig& cfg, const fs::path& out, std::ostream& log) {
  prepare(out);
  const std::string hash = config::config_hash(cfg);
  CsvWriter report(out / "kernel_report.csv", hash, "check,alpha,eta,case,error,tolerance,pass");
  bool ok = true;
  double worst_oracle = 0.0, worst_closed = 0.0;

  // Gamma constant simplification.
  for (double a : {0.25, 0.5, 0.75}) {
    const double unsimplified = 2.0 * std::sin(a * std::numbers::pi) * std::tgamma(1.5) / std::pow(std::numbers::pi, 1.5);
    const double err = std::abs(kernel::gamma_const(a) - unsimplified) / unsimplified;
    const bool pass = err <= 1e-14;
    ok = ok && pass;
    report.row("gamma", a, 0.0, "simplification", err, 1e-14, pass);
  }

  // Certificates and diffusive vs direct oracle comparisons.
  std::vector<std::pair<double, double>> params = {{cfg.alpha, cfg.eta}};
  for (double a : {0.3, 0.5, 0.7})
    for (double e : {0.5, 1.0})
      if (!(a == cfg.alpha && e == cfg.eta)) params.emplace_back(a, e);

  const double dt = cfg.oracle_T / cfg.oracle_steps;
  const auto steps = static_cast<std::size_t>(cfg.oracle_steps);
  const std::array<std::pair<const char*, std::function<double(double)>>, 4> signals = {{
      {"one", [](double) { return 1.0; }},
      {"t", [](double t) { return t; }},
      {"sin", [](double t) { return std::sin(t); }},
      {"pulse", [](double t) { return std::exp(-(t - 3.0) * (t - 3.0)); }},
  }};

  for (const auto& [a, e] : params) {
    const kernel::FractionalParams fp(a, e);
    std::optional<kernel::DiffusiveQuadrature> quad;
    try {
      quad.emplace(kernel::build_quadrature(fp, cfg.n_nodes, cfg.xi_max, cfg.quadrature_strategy(),
                                            cfg.certificate_tol));
      report.row("certificate", a, e, cfg.strategy, quad->certificate().relative_error, cfg.certificate_tol, true);
    } catch (const kernel::CertificateError& ex) {
      ok = false;
      report.row("certificate", a, e, cfg.strategy, ex.certificate().relative_error, cfg.certificate_tol, false);
      log << "certificate failure at alpha=" << a << " eta=" << e << ": " << ex.what() << "\n";
      continue;
    }
    for (const auto& [name, f] : signals) {
      const auto U = kernel::SampledSignal::sample(dt, steps, f);
      const auto direct = kernel::fractional_integral_direct(U, fp, 1.0 - a);
      const auto diffusive = kernel::diffusive_apply(U, *quad);
      double err = 0.0;
      for (std::size_t i = 0; i < U.size(); ++i)
        err = std::max(err, std::abs(diffusive.values[i] - direct.values[i]));
      err /= direct.max_abs();
      const bool pass = err <= cfg.oracle_tol;
      ok = ok && pass;
      worst_oracle = std::max(worst_oracle, err);
      report.row("oracle", a, e, name, err, cfg.oracle_tol, pass);
    }
  }

  // Closed-form integrals against adaptive quadrature.
  const std::vector<double> alphas = {0.25, 0.5, 0.75};
  const std::vector<double> etas = {0.5, 1.0, 2.0};
  const std::vector<double> omegas = {-100.0, -10.0, -1.0, -0.5, 0.5, 1.0, 10.0, 100.0};
  const auto rows = kernel::branch_report(alphas, etas, omegas);
  CsvWriter branch(out / "branch_report.csv", hash,
                   "alpha,eta,omega,branch,resolvent_error,resolvent_printed_error,squared_error,"
                   "squared_printed_error");
  for (const auto& r : rows) {
    branch.row(r.alpha, r.eta, r.omega, r.branch, r.resolvent_error, r.resolvent_printed_error,
               r.squared_error, r.squared_printed_error);
    const std::string where = "omega=" + num(r.omega);
    const bool p1 = r.resolvent_error <= cfg.closed_form_tol;
    const bool p2 = r.squared_error <= cfg.closed_form_tol;
    ok = ok && p1 && p2;
    worst_closed = std::max({worst_closed, r.resolvent_error, r.squared_error});
    report.row("closed_resolvent", r.alpha, r.eta, where, r.resolvent_error, cfg.closed_form_tol, p1);
    report.row("closed_squared", r.alpha, r.eta, where, r.squared_error, cfg.closed_form_tol, p2);
  }

  log << "verify-kernel: worst oracle error " << worst_oracle << ", worst closed-form error " << worst_closed
      << (ok ? " (pass)" : " (FAIL)") << "\n";
  return ok ? kExitOk : kExitTolerance;
}

int cmd_simulate(const config::RunConfig& cfg, const fs::path& out, std::ostream& log) {
  prepare(out);
  const System sys = build_system(cfg);
  const auto traj = run_simulation(cfg, sys);
  const std::string hash = config::config_hash(cfg);
  write_energy(out / "energy.csv", hash, traj);
  std::vector<std::string> extra = {"steps = " + std::to_string(traj.steps)};
  if (sys.quad) {
    const auto lines = certificate_lines(*sys.quad);
    extra.insert(extra.end(), lines.begin(), lines.end());
  }
  write_meta(out, cfg, "simulate", extra);
  const auto& first = traj.records.front();
  const auto& last = traj.records.back();
  log << "simulate: " << traj.steps << " steps, E(0) = " << first.E << ", E(T) = " << last.E << "\n";
  return kExitOk;
}

int cmd_resolvent(const config::RunConfig& cfg, const fs::path& out, std::ostream& log) {
  require_positive_eta(cfg);
  const spatial::Grid1D grid(cfg.n);
  const auto omegas = omega_grid(cfg, grid);
  if (omegas.empty()) throw std::invalid_argument("resolvent: the frequency grid is empty");
  prepare(out);
  const System sys = build_system(cfg);
  const auto backend = cfg.norm_backend();

  std::vector<resolvent::ResolventScan> scans;
  if (cfg.fractional) scans.push_back(resolvent::scan(*sys.gen, omegas, backend));
  const auto classical = resolvent::assemble_classical(sys.grid, config::make_damping(cfg, sys.grid));
  scans.push_back(resolvent::scan(classical, omegas, backend));

  const std::string hash = config::config_hash(cfg);
  {
    CsvWriter csv(out / "resolvent.csv", hash, "omega,norm,flagged,which");
    for (const auto& s : scans)
      for (std::size_t i = 0; i < s.size(); ++i)
        csv.row(s.omegas[i], s.norms[i], static_cast<bool>(s.flagged[i]), resolvent::to_string(s.which));
  }
  CsvWriter fits(out / "growthfit.csv", hash, "which,exponent,intercept,residual,window_lo,window_hi");
  const double lo = cfg.omega_min, hi = cfg.resolved_omega_max();
  for (const auto& s : scans) {
    const auto g = resolvent::fit_growth(s, lo, hi);
    fits.row(resolvent::to_string(s.which), g.exponent, g.intercept, g.residual, g.window_lo, g.window_hi);
    log << "resolvent: " << resolvent::to_string(s.which) << " exponent " << g.exponent << " over "
        << g.points << " points\n";
  }
  return kExitOk;
}

int cmd_decay(const config::RunConfig& cfg, const fs::path& out, std::ostream& log) {
  prepare(out);
  const System sys = build_system(cfg);
  const auto traj = run_simulation(cfg, sys);
  const std::string hash = config::config_hash(cfg);
  write_energy(out / "energy.csv", hash, traj);

  const auto poly = decay::fit_polynomial_rate(traj.records, cfg.t_min, cfg.t_max);
  const auto expo = decay::fit_exponential_rate(traj.records, cfg.t_min, cfg.t_max);

  std::vector<std::string> extra = {"steps = " + std::to_string(traj.steps)};
  CsvWriter csv(out / "decay.csv", hash, "model,rate,predicted,deviation,pass");
  if (cfg.fractional) {
    require_positive_eta(cfg);
    const auto classical = resolvent::assemble_classical(sys.grid, config::make_damping(cfg, sys.grid));
    const auto omegas = omega_grid(cfg, sys.grid);
    const auto cscan = resolvent::scan(classical, omegas, cfg.norm_backend());
    const auto growth = resolvent::classify_growth(cscan, cfg.omega_min, cfg.resolved_omega_max());
    const auto prediction = resolvent::predict_decay(cfg.alpha, growth);
    const auto v = decay::compare_to_prediction(poly, prediction, cfg.tol);
    csv.row("polynomial", poly.rate, prediction.model == resolvent::DecayModel::Polynomial ? prediction.rate : kNaN,
            v.mismatch ? kNaN : v.deviation, v.pass);
    csv.row("exponential", expo.rate, kNaN, kNaN, expo.accepted);
    if (prediction.model == resolvent::DecayModel::Logarithmic)
      csv.row("logarithmic", kNaN, prediction.rate, kNaN, !poly.accepted && !expo.accepted);
    extra.push_back("classical_ell = " + num(growth.raw_ell));
    extra.push_back("classical_model = " + std::string(growth.exponential ? "exponential" : "power"));
    extra.push_back("verdict = " + (v.note.empty() ? std::string(v.pass ? "pass" : "fail") : v.note));
    log << "decay: polynomial rate " << poly.rate << " (goodness " << poly.goodness << "), predicted "
        << resolvent::to_string(prediction.model) << " " << prediction.rate << ", "
        << (v.pass ? "pass" : "fail") << "\n";
    const auto lines = certificate_lines(*sys.quad);
    extra.insert(extra.end(), lines.begin(), lines.end());
  } else {
    csv.row("polynomial", poly.rate, kNaN, kNaN, poly.accepted);
    csv.row("exponential", expo.rate, kNaN, kNaN, expo.accepted);
    log << "decay: classical exponential rate " << expo.rate << " (goodness " << expo.goodness << ")\n";
  }
  if (!poly.accepted && !expo.accepted) {
    csv.row("non-decaying", 0.0, kNaN, kNaN, true);
    extra.push_back("non-decaying: no decay law fits the window");
    log << "decay: non-decaying\n";
  }
  write_meta(out, cfg, "decay", extra);
  return kExitOk;
}

int run_command(const std::string& name, const config::RunConfig& cfg, const fs::path& out,
                std::ostream& log, std::ostream& err) {
  try {
    if (name == "verify-kernel") return cmd_verify_kernel(cfg, out, log);
    if (name == "simulate") return cmd_simulate(cfg, out, log);
    if (name == "resolvent") return cmd_resolvent(cfg, out, log);
    if (name == "decay") return cmd_decay(cfg, out, log);
    err << "error: unknown command '" << name << "'\n";
    return kExitUsage;
  } catch (const kernel::CertificateError& e) {
    err << "error: certificate failure: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const resolvent::InsufficientPoints& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const config::ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitTolerance;
  }
}

}  // namespace fracdamp::commands
