#include "fracdamp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace fracdamp::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    if constexpr (std::is_floating_point_v<T>) os << fmt(v[i]);
    else os << v[i];
  }
  return os.str();
}

/// Field table: section.key -> setter from string (throws std::invalid_argument).
using Setter = std::function<void(RunConfig&, const std::string&)>;

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("expected a number, got '" + s + "'");
  if (!std::isfinite(v)) throw std::invalid_argument("value must be finite");
  return v;
}

long long to_int(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string one_of(const std::string& s, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (s == o) return s;
  std::string msg = "expected one of";
  for (const char* o : options) msg += std::string(" ") + o;
  throw std::invalid_argument(msg + ", got '" + s + "'");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"params.alpha", [](RunConfig& c, const std::string& v) { c.alpha = to_double(v); }},
      {"params.eta", [](RunConfig& c, const std::string& v) { c.eta = to_double(v); }},
      {"params.fractional", [](RunConfig& c, const std::string& v) { c.fractional = to_bool(v); }},
      {"damping.kind",
       [](RunConfig& c, const std::string& v) {
         c.damping_kind = one_of(v, {"internal", "kelvin_voigt", "pointwise", "none"});
       }},
      {"damping.profile",
       [](RunConfig& c, const std::string& v) { c.profile = one_of(v, {"smooth", "constant"}); }},
      {"damping.lo", [](RunConfig& c, const std::string& v) { c.lo = to_double(v); }},
      {"damping.hi", [](RunConfig& c, const std::string& v) { c.hi = to_double(v); }},
      {"damping.a0", [](RunConfig& c, const std::string& v) { c.a0 = to_double(v); }},
      {"damping.ramp", [](RunConfig& c, const std::string& v) { c.ramp = to_double(v); }},
      {"damping.zeta", [](RunConfig& c, const std::string& v) { c.zeta = to_double(v); }},
      {"grid.n", [](RunConfig& c, const std::string& v) { c.n = static_cast<int>(to_int(v)); }},
      {"quadrature.n_nodes",
       [](RunConfig& c, const std::string& v) { c.n_nodes = static_cast<int>(to_int(v)); }},
      {"quadrature.xi_max", [](RunConfig& c, const std::string& v) { c.xi_max = to_double(v); }},
      {"quadrature.strategy",
       [](RunConfig& c, const std::string& v) { c.strategy = one_of(v, {"tail_mapped", "truncated"}); }},
      {"quadrature.tolerance",
       [](RunConfig& c, const std::string& v) { c.certificate_tol = to_double(v); }},
      {"time.T", [](RunConfig& c, const std::string& v) { c.T = to_double(v); }},
      {"time.dt", [](RunConfig& c, const std::string& v) { c.dt = to_double(v); }},
      {"time.record_every",
       [](RunConfig& c, const std::string& v) { c.record_every = static_cast<int>(to_int(v)); }},
      {"time.higher_energy", [](RunConfig& c, const std::string& v) { c.higher_energy = to_bool(v); }},
      {"scan.omega_min", [](RunConfig& c, const std::string& v) { c.omega_min = to_double(v); }},
      {"scan.omega_max", [](RunConfig& c, const std::string& v) { c.omega_max = to_double(v); }},
      {"scan.points", [](RunConfig& c, const std::string& v) { c.points = static_cast<int>(to_int(v)); }},
      {"scan.spacing", [](RunConfig& c, const std::string& v) { c.spacing = one_of(v, {"modal", "log"}); }},
      {"scan.backend",
       [](RunConfig& c, const std::string& v) { c.backend = one_of(v, {"auto", "dense", "lanczos"}); }},
      {"initial.kind",
       [](RunConfig& c, const std::string& v) { c.initial = one_of(v, {"power", "modes", "zero", "random"}); }},
      {"initial.modes",
       [](RunConfig& c, const std::string& v) {
         c.modes.clear();
         for (const auto& s : split_list(v)) c.modes.push_back(static_cast<int>(to_int(s)));
       }},
      {"initial.coefficients",
       [](RunConfig& c, const std::string& v) {
         c.coefficients.clear();
         for (const auto& s : split_list(v)) c.coefficients.push_back(to_double(s));
       }},
      {"initial.exponent", [](RunConfig& c, const std::string& v) { c.spectrum_exponent = to_double(v); }},
      {"decay.t_min", [](RunConfig& c, const std::string& v) { c.t_min = to_double(v); }},
      {"decay.t_max", [](RunConfig& c, const std::string& v) { c.t_max = to_double(v); }},
      {"decay.tol", [](RunConfig& c, const std::string& v) { c.tol = to_double(v); }},
      {"verify.closed_form_tol", [](RunConfig& c, const std::string& v) { c.closed_form_tol = to_double(v); }},
      {"verify.oracle_tol", [](RunConfig& c, const std::string& v) { c.oracle_tol = to_double(v); }},
      {"verify.T", [](RunConfig& c, const std::string& v) { c.oracle_T = to_double(v); }},
      {"verify.steps",
       [](RunConfig& c, const std::string& v) { c.oracle_steps = static_cast<int>(to_int(v)); }},
      {"output.directory", [](RunConfig& c, const std::string& v) { c.directory = v; }},
      {"output.formats",
       [](RunConfig& c, const std::string& v) {
         for (const auto& f : split_list(v)) one_of(f, {"csv"});
         c.formats = v;
       }},
      {"run.seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = to_int(v);
         if (s < 0) throw std::invalid_argument("seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

/// Line on which each field was set, for cross-field diagnostics.
using LineMap = std::map<std::string, int>;

void check(bool ok, const std::string& source, const LineMap& lines, const std::string& field,
           const std::string& what) {
  if (ok) return;
  const auto it = lines.find(field);
  throw ConfigError(source, it == lines.end() ? 0 : it->second, field, what);
}

void validate_impl(const RunConfig& c, const std::string& src, const LineMap& L) {
  check(c.alpha > 0.0 && c.alpha < 1.0, src, L, "params.alpha", "alpha must lie in (0, 1)");
  check(c.eta >= 0.0, src, L, "params.eta", "eta must be >= 0");
  check(c.n >= 3, src, L, "grid.n", "need at least 3 interior points");
  check(c.n_nodes >= 4, src, L, "quadrature.n_nodes", "need at least 4 nodes");
  check(c.xi_max > 1.0, src, L, "quadrature.xi_max", "xi_max must exceed 1");
  check(c.certificate_tol > 0.0, src, L, "quadrature.tolerance", "tolerance must be > 0");
  check(c.T > 0.0, src, L, "time.T", "T must be > 0");
  check(c.dt > 0.0 && c.dt <= c.T, src, L, "time.dt", "dt must lie in (0, T]");
  check(c.record_every >= 1, src, L, "time.record_every", "record_every must be >= 1");
  check(c.omega_min > 0.0, src, L, "scan.omega_min", "omega_min must be > 0");
  check(c.omega_max == 0.0 || c.omega_max > c.omega_min, src, L, "scan.omega_max",
        "omega_max must exceed omega_min (or be 0 for the default band)");
  check(c.points >= 1, src, L, "scan.points", "scan needs at least one point");
  if (c.damping_kind == "internal" || c.damping_kind == "kelvin_voigt") {
    check(c.lo >= 0.0 && c.lo < c.hi, src, L, "damping.lo", "need 0 <= lo < hi");
    check(c.hi <= 1.0, src, L, "damping.hi", "hi must be <= 1");
    check(c.a0 > 0.0, src, L, "damping.a0", "a0 must be > 0");
    check(c.ramp >= 0.0, src, L, "damping.ramp", "ramp must be >= 0");
  }
  if (c.damping_kind == "pointwise")
    check(c.zeta > 0.0 && c.zeta < 1.0, src, L, "damping.zeta", "zeta must lie in (0, 1)");
  if (c.initial == "modes") {
    check(!c.modes.empty(), src, L, "initial.modes", "mode list is empty");
    check(c.modes.size() == c.coefficients.size(), src, L, "initial.coefficients",
          "need one coefficient per mode");
    for (int k : c.modes) check(k >= 1 && k <= c.n, src, L, "initial.modes", "mode index outside 1..n");
  }
  if (c.initial == "power")
    check(c.spectrum_exponent > 0.5, src, L, "initial.exponent", "exponent must exceed 1/2");
  check(c.t_min >= 0.0 && c.t_max > c.t_min, src, L, "decay.t_min", "need 0 <= t_min < t_max");
  check(c.tol > 0.0, src, L, "decay.tol", "tol must be > 0");
  check(c.closed_form_tol > 0.0, src, L, "verify.closed_form_tol", "tolerance must be > 0");
  check(c.oracle_tol > 0.0, src, L, "verify.oracle_tol", "tolerance must be > 0");
  check(c.oracle_T > 0.0, src, L, "verify.T", "T must be > 0");
  check(c.oracle_steps >= 2, src, L, "verify.steps", "need at least 2 steps");
  check(!c.directory.empty(), src, L, "output.directory", "directory must not be empty");
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& field,
                         const std::string& what)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                         field + ": " + what),
      line_(line),
      field_(field) {}

double RunConfig::resolved_omega_max() const {
  return omega_max > 0.0 ? omega_max : std::numbers::pi * (n + 1) / 4.0;
}

kernel::QuadratureStrategy RunConfig::quadrature_strategy() const {
  return kernel::parse_strategy(strategy);
}

resolvent::NormBackend RunConfig::norm_backend() const { return resolvent::parse_backend(backend); }

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  LineMap lines;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, lineno, line, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(source, lineno, line, "empty section name");
      const auto known = std::ranges::any_of(
          setters(), [&](const auto& kv) { return kv.first.starts_with(section + "."); });
      if (!known) throw ConfigError(source, lineno, section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, lineno, line, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(source, lineno, key, "key outside of any [section]");
    const std::string field = section + "." + key;
    const auto it = setters().find(field);
    if (it == setters().end()) throw ConfigError(source, lineno, field, "unknown key");
    if (value.empty()) throw ConfigError(source, lineno, field, "missing value");
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, lineno, field, e.what());
    }
    lines[field] = lineno;
  }
  validate_impl(cfg, source, lines);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "file", "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void validate(const RunConfig& cfg, const std::string& source) { validate_impl(cfg, source, {}); }

std::string canonical(const RunConfig& c) {
  std::ostringstream os;
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << "[params]\nalpha = " << fmt(c.alpha) << "\neta = " << fmt(c.eta) << "\nfractional = " << b(c.fractional)
     << "\n\n[damping]\nkind = " << c.damping_kind << "\nprofile = " << c.profile << "\nlo = " << fmt(c.lo)
     << "\nhi = " << fmt(c.hi) << "\na0 = " << fmt(c.a0) << "\nramp = " << fmt(c.ramp)
     << "\nzeta = " << fmt(c.zeta) << "\n\n[grid]\nn = " << c.n << "\n\n[quadrature]\nn_nodes = " << c.n_nodes
     << "\nxi_max = " << fmt(c.xi_max) << "\nstrategy = " << c.strategy
     << "\ntolerance = " << fmt(c.certificate_tol) << "\n\n[time]\nT = " << fmt(c.T) << "\ndt = " << fmt(c.dt)
     << "\nrecord_every = " << c.record_every << "\nhigher_energy = " << b(c.higher_energy)
     << "\n\n[scan]\nomega_min = " << fmt(c.omega_min) << "\nomega_max = " << fmt(c.omega_max)
     << "\npoints = " << c.points << "\nspacing = " << c.spacing << "\nbackend = " << c.backend
     << "\n\n[initial]\nkind = " << c.initial << "\nmodes = " << join(c.modes)
     << "\ncoefficients = " << join(c.coefficients) << "\nexponent = " << fmt(c.spectrum_exponent)
     << "\n\n[decay]\nt_min = " << fmt(c.t_min) << "\nt_max = " << fmt(c.t_max) << "\ntol = " << fmt(c.tol)
     << "\n\n[verify]\nclosed_form_tol = " << fmt(c.closed_form_tol) << "\noracle_tol = " << fmt(c.oracle_tol)
     << "\nT = " << fmt(c.oracle_T) << "\nsteps = " << c.oracle_steps << "\n\n[output]\ndirectory = "
     << c.directory << "\nformats = " << c.formats << "\n\n[run]\nseed = " << c.seed << "\n";
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

spatial::DampingConfig make_damping(const RunConfig& cfg, const spatial::Grid1D& grid) {
  spatial::ProfileSpec prof;
  prof.shape = cfg.profile == "constant" ? spatial::ProfileShape::Constant : spatial::ProfileShape::Smooth;
  prof.lo = cfg.lo;
  prof.hi = cfg.hi;
  prof.a0 = cfg.a0;
  prof.ramp = cfg.ramp;
  if (cfg.damping_kind == "internal") return spatial::make_internal(grid, prof);
  if (cfg.damping_kind == "kelvin_voigt") return spatial::make_kelvin_voigt(grid, prof);
  if (cfg.damping_kind == "pointwise") return spatial::make_pointwise(cfg.zeta);
  return spatial::Undamped{};
}

augmented::AugmentedState make_initial(const RunConfig& cfg, const augmented::Generator& gen) {
  const int n = gen.n();
  const int nx = gen.classical() ? 0 : gen.n_xi();
  if (cfg.initial == "zero") return augmented::AugmentedState::zero(n, gen.m(), nx);
  if (cfg.initial == "modes") return augmented::modal_state(gen, cfg.modes, cfg.coefficients);

  std::vector<int> ks(n);
  std::vector<double> cs(n);
  if (cfg.initial == "power") {
    for (int k = 1; k <= n; ++k) {
      ks[k - 1] = k;
      cs[k - 1] = std::pow(static_cast<double>(k), -cfg.spectrum_exponent);
    }
  } else {
    // Random modal coefficients with the same spectral decay.
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    for (int k = 1; k <= n; ++k) {
      ks[k - 1] = k;
      cs[k - 1] = normal(rng) * std::pow(static_cast<double>(k), -cfg.spectrum_exponent);
    }
  }
  return augmented::modal_state(gen, ks, cs);
}

}  // namespace fracdamp::config
