#pragma once

// The four CLI commands. Each writes CSV files into `out` (every file starts
// with a "# config_hash: ..." line) and returns the process exit status.

#include "fracdamp/config.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace fracdamp::commands {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      ///< bad config or violated precondition
inline constexpr int kExitTolerance = 2;  ///< certificate or tolerance breach

namespace fs = std::filesystem;

/// Oracle suite for the kernel module: quadrature certificates, diffusive vs
/// direct fractional integrals, closed-form integrals vs adaptive quadrature.
/// Writes kernel_report.csv and branch_report.csv.
int cmd_verify_kernel(const config::RunConfig& cfg, const fs::path& out, std::ostream& log);

/// Writes energy.csv and meta.ini.
int cmd_simulate(const config::RunConfig& cfg, const fs::path& out, std::ostream& log);

/// Writes resolvent.csv and growthfit.csv for the augmented and classical generators.
int cmd_resolvent(const config::RunConfig& cfg, const fs::path& out, std::ostream& log);

/// Simulates, fits decay laws and compares them with the predicted rate.
/// Writes energy.csv, decay.csv and meta.ini.
int cmd_decay(const config::RunConfig& cfg, const fs::path& out, std::ostream& log);

/// Dispatches by command name and maps exceptions to exit codes, printing
/// diagnostics to `err`.
int run_command(const std::string& name, const config::RunConfig& cfg, const fs::path& out,
                std::ostream& log, std::ostream& err);

}  // namespace fracdamp::commands
