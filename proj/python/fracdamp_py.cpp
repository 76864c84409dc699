#include "fracdamp/augmented.hpp"
#include "fracdamp/commands.hpp"
#include "fracdamp/config.hpp"
#include "fracdamp/decay.hpp"
#include "fracdamp/kernel.hpp"
#include "fracdamp/resolvent.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace fracdamp;

namespace {

using Array = py::array_t<double>;

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

kernel::SampledSignal to_signal(const Array& values, double dt) {
  const auto r = values.unchecked<1>();
  kernel::SampledSignal s;
  s.dt = dt;
  s.values.resize(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) s.values[static_cast<std::size_t>(i)] = r(i);
  return s;
}

kernel::DiffusiveQuadrature quadrature_for(const config::RunConfig& cfg) {
  return kernel::build_quadrature(kernel::FractionalParams(cfg.alpha, cfg.eta), cfg.n_nodes, cfg.xi_max,
                                  cfg.quadrature_strategy(), cfg.certificate_tol);
}

py::dict simulate(const std::string& text) {
  const auto cfg = config::parse_config(text, "<python>");
  const spatial::Grid1D grid(cfg.n);
  const auto damping = config::make_damping(cfg, grid);
  std::optional<kernel::DiffusiveQuadrature> quad;
  if (cfg.fractional) quad.emplace(quadrature_for(cfg));
  const auto gen = quad ? augmented::Generator(grid, damping, *quad) : augmented::Generator(grid, damping);
  augmented::SimulationOptions opts;
  opts.T = cfg.T;
  opts.dt = cfg.dt;
  opts.record_every = cfg.record_every;
  opts.higher_energy = cfg.higher_energy;
  augmented::Trajectory traj;
  {
    py::gil_scoped_release release;
    traj = augmented::simulate(config::make_initial(cfg, gen), gen, opts);
  }
  std::vector<double> t, E, E1, E2, diss, hoE;
  for (const auto& r : traj.records) {
    t.push_back(r.t);
    E.push_back(r.E);
    E1.push_back(r.E1);
    E2.push_back(r.E2);
    diss.push_back(r.dissipation);
    hoE.push_back(r.hoE);
  }
  py::dict out;
  out["t"] = to_array(t);
  out["E"] = to_array(E);
  out["E1"] = to_array(E1);
  out["E2"] = to_array(E2);
  out["dissipation"] = to_array(diss);
  out["hoE"] = to_array(hoE);
  out["steps"] = traj.steps;
  return out;
}

py::dict scan(const std::string& text, const std::string& which) {
  const auto cfg = config::parse_config(text, "<python>");
  const spatial::Grid1D grid(cfg.n);
  const auto damping = config::make_damping(cfg, grid);
  const double lo = cfg.omega_min, hi = cfg.resolved_omega_max();
  const auto omegas = cfg.spacing == "modal" ? resolvent::modal_band(grid, lo, hi, cfg.points)
                                             : resolvent::log_grid(lo, hi, cfg.points);
  resolvent::ResolventScan s;
  if (which == "augmented") {
    const auto quad = quadrature_for(cfg);
    const augmented::Generator gen(grid, damping, quad);
    py::gil_scoped_release release;
    s = resolvent::scan(gen, omegas, cfg.norm_backend());
  } else if (which == "classical") {
    const auto gen = resolvent::assemble_classical(grid, damping);
    py::gil_scoped_release release;
    s = resolvent::scan(gen, omegas, cfg.norm_backend());
  } else {
    throw py::value_error("which must be 'augmented' or 'classical'");
  }
  py::array_t<bool> flagged(static_cast<py::ssize_t>(s.size()));
  auto f = flagged.mutable_unchecked<1>();
  for (std::size_t i = 0; i < s.size(); ++i) f(static_cast<py::ssize_t>(i)) = s.flagged[i];
  py::dict out;
  out["omega"] = to_array(s.omegas);
  out["norm"] = to_array(s.norms);
  out["flagged"] = flagged;
  const auto fit = resolvent::fit_growth(s, lo, hi);
  out["exponent"] = fit.exponent;
  out["intercept"] = fit.intercept;
  out["residual"] = fit.residual;
  return out;
}

std::vector<augmented::EnergyRecord> to_trace(const Array& t, const Array& E) {
  const auto rt = t.unchecked<1>();
  const auto rE = E.unchecked<1>();
  if (rt.shape(0) != rE.shape(0)) throw py::value_error("t and E must have the same length");
  std::vector<augmented::EnergyRecord> trace(static_cast<std::size_t>(rt.shape(0)));
  for (py::ssize_t i = 0; i < rt.shape(0); ++i) {
    trace[static_cast<std::size_t>(i)].t = rt(i);
    trace[static_cast<std::size_t>(i)].E = rE(i);
  }
  return trace;
}

py::dict fit_decay(const Array& t, const Array& E, const std::string& model, double t_min, double t_max) {
  const auto trace = to_trace(t, E);
  decay::DecayFit f;
  if (model == "polynomial") f = decay::fit_polynomial_rate(trace, t_min, t_max);
  else if (model == "exponential") f = decay::fit_exponential_rate(trace, t_min, t_max);
  else throw py::value_error("model must be 'polynomial' or 'exponential'");
  py::dict out;
  out["model"] = resolvent::to_string(f.model);
  out["rate"] = f.rate;
  out["goodness"] = f.goodness;
  out["residual"] = f.residual;
  out["confidence"] = f.confidence;
  out["t_min"] = f.t_min;
  out["t_max"] = f.t_max;
  out["accepted"] = f.accepted;
  return out;
}

}  // namespace

PYBIND11_MODULE(_fracdamp, m) {
  m.doc() = "Fractionally damped wave equations: kernels, simulation, resolvent scans and decay fits";

  py::register_exception<kernel::CertificateError>(m, "CertificateError", PyExc_ValueError);
  py::register_exception<config::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<resolvent::InsufficientPoints>(m, "InsufficientPoints", PyExc_ValueError);

  m.def("gamma_const", &kernel::gamma_const, py::arg("alpha"));
  m.def("p_weight", &kernel::p_weight, py::arg("xi"), py::arg("alpha"));
  m.def(
      "closed_integral_resolvent",
      [](double alpha, double eta, double omega) {
        return kernel::closed_integral_resolvent(kernel::FractionalParams(alpha, eta), omega);
      },
      py::arg("alpha"), py::arg("eta"), py::arg("omega"));
  m.def(
      "closed_integral_squared",
      [](double alpha, double eta, double omega) {
        return kernel::closed_integral_squared(kernel::FractionalParams(alpha, eta), omega);
      },
      py::arg("alpha"), py::arg("eta"), py::arg("omega"));
  m.def(
      "kv_coefficients",
      [](double alpha, double eta, double omega) {
        const auto c = kernel::kv_coefficients(kernel::FractionalParams(alpha, eta), omega);
        return py::make_tuple(c.c1, c.c2);
      },
      py::arg("alpha"), py::arg("eta"), py::arg("omega"));

  py::class_<kernel::DiffusiveQuadrature>(m, "Quadrature")
      .def(py::init([](double alpha, double eta, int n_nodes, double xi_max, const std::string& strategy,
                       double tolerance) {
             return kernel::build_quadrature(kernel::FractionalParams(alpha, eta), n_nodes, xi_max,
                                             kernel::parse_strategy(strategy), tolerance);
           }),
           py::arg("alpha"), py::arg("eta"), py::arg("n_nodes") = kernel::kDefaultNodes,
           py::arg("xi_max") = kernel::kDefaultXiMax, py::arg("strategy") = "tail_mapped",
           py::arg("tolerance") = kernel::kDefaultCertificateTolerance)
      .def_property_readonly("nodes", [](const kernel::DiffusiveQuadrature& q) {
        return to_array({q.nodes().begin(), q.nodes().end()});
      })
      .def_property_readonly("weights", [](const kernel::DiffusiveQuadrature& q) {
        return to_array({q.weights().begin(), q.weights().end()});
      })
      .def_property_readonly("gamma", &kernel::DiffusiveQuadrature::gamma)
      .def_property_readonly("certificate_error",
                             [](const kernel::DiffusiveQuadrature& q) { return q.certificate().relative_error; })
      .def("transfer", &kernel::DiffusiveQuadrature::transfer, py::arg("z"))
      .def("__len__", &kernel::DiffusiveQuadrature::size);

  m.def(
      "diffusive_apply",
      [](const Array& values, double dt, const kernel::DiffusiveQuadrature& quad) {
        return to_array(kernel::diffusive_apply(to_signal(values, dt), quad).values);
      },
      py::arg("values"), py::arg("dt"), py::arg("quadrature"),
      "I^{1-alpha, eta} of uniformly sampled values through the node ODEs.");
  m.def(
      "fractional_integral",
      [](const Array& values, double dt, double alpha, double eta, double order) {
        return to_array(
            kernel::fractional_integral_direct(to_signal(values, dt), kernel::FractionalParams(alpha, eta), order)
                .values);
      },
      py::arg("values"), py::arg("dt"), py::arg("alpha"), py::arg("eta"), py::arg("order"),
      "Direct product-integration reference for I^{order, eta}.");

  m.def("simulate", &simulate, py::arg("config") = "",
        "Runs the configured simulation; returns the energy trace as arrays.");
  m.def("resolvent_scan", &scan, py::arg("config") = "", py::arg("which") = "augmented",
        "Resolvent norms along the configured frequency band, with the fitted growth exponent.");
  m.def("fit_decay", &fit_decay, py::arg("t"), py::arg("E"), py::arg("model") = "polynomial",
        py::arg("t_min") = -1.0, py::arg("t_max") = std::numeric_limits<double>::infinity());
  m.def(
      "predict_decay", [](double alpha, double ell) { return resolvent::predict_decay(alpha, ell).rate; },
      py::arg("alpha"), py::arg("ell") = 0.0);

  m.def(
      "canonical_config", [](const std::string& text) { return config::canonical(config::parse_config(text)); },
      py::arg("config") = "");
  m.def(
      "config_hash", [](const std::string& text) { return config::config_hash(config::parse_config(text)); },
      py::arg("config") = "");
  m.def(
      "run",
      [](const std::string& command, const std::string& text, const std::string& out) {
        const auto cfg = config::parse_config(text, "<python>");
        std::ostringstream log, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = commands::run_command(command, cfg, out, log, err);
        }
        return py::make_tuple(code, log.str(), err.str());
      },
      py::arg("command"), py::arg("config") = "", py::arg("out") = "out",
      "Runs a CLI command; returns (exit_code, log, errors).");
}
