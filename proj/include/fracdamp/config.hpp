#pragma once

// Run configuration: an INI-style text file with [section] headers and
// key = value lines. '#' and ';' start comments.

#include "fracdamp/augmented.hpp"
#include "fracdamp/kernel.hpp"
#include "fracdamp/resolvent.hpp"
#include "fracdamp/spatial.hpp"

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdamp::config {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& field, const std::string& what);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct RunConfig {
  // [params]
  double alpha = 0.5;
  double eta = 1.0;
  bool fractional = true;  ///< false: classical damping B B* u_t instead

  // [damping]
  std::string damping_kind = "internal";  ///< internal, kelvin_voigt, pointwise, none
  std::string profile = "smooth";         ///< smooth, constant
  double lo = 0.3;
  double hi = 0.7;
  double a0 = 1.0;
  double ramp = 0.1;
  double zeta = 0.5;

  // [grid]
  int n = 200;

  // [quadrature]
  int n_nodes = kernel::kDefaultNodes;
  double xi_max = kernel::kDefaultXiMax;
  std::string strategy = "tail_mapped";
  double certificate_tol = kernel::kDefaultCertificateTolerance;

  // [time]
  double T = 200.0;
  double dt = 0.0025;
  int record_every = 40;
  bool higher_energy = true;

  // [scan]
  double omega_min = 2.0 * std::numbers::pi;
  double omega_max = 0.0;  ///< 0: a quarter of the grid Nyquist frequency
  int points = 64;
  std::string spacing = "modal";  ///< modal, log
  std::string backend = "auto";

  // [initial]
  std::string initial = "power";  ///< power, modes, zero, random
  std::vector<int> modes = {1, 3};
  std::vector<double> coefficients = {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
  double spectrum_exponent = 2.5;  ///< power: u_k proportional to k^-exponent

  // [decay]
  double t_min = 20.0;
  double t_max = 200.0;
  double tol = 0.2;

  // [verify]
  double closed_form_tol = 1e-6;
  double oracle_tol = 1e-3;
  double oracle_T = 10.0;
  int oracle_steps = 1000;

  // [output]
  std::string directory = "out";
  std::string formats = "csv";

  // command line
  std::uint64_t seed = 1;

  double resolved_omega_max() const;
  kernel::QuadratureStrategy quadrature_strategy() const;
  resolvent::NormBackend norm_backend() const;
};

/// Parses and validates; `source` names the input in diagnostics.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Checks cross-field invariants; throws ConfigError.
void validate(const RunConfig& cfg, const std::string& source = "<config>");

/// Canonical key = value rendering of every field; parse_config(canonical(c))
/// reproduces c.
std::string canonical(const RunConfig& cfg);

/// FNV-1a 64-bit hash of canonical(cfg), as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Builds the damping configuration on `grid`.
spatial::DampingConfig make_damping(const RunConfig& cfg, const spatial::Grid1D& grid);

/// Initial state per the [initial] section.
augmented::AugmentedState make_initial(const RunConfig& cfg, const augmented::Generator& gen);

}  // namespace fracdamp::config
