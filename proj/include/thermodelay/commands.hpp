/// @file commands.hpp
/// @brief The four command-line actions: certify, simulate, sweep, spectrum.
///
/// Each writes its files into an output directory and returns the process
/// exit code (0 ok, 1 usage or parse error, 2 certification failure,
/// 3 numerical failure).

#pragma once

#include "thermodelay/config.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace thermodelay {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitCertification = 2, kExitNumerical = 3 };

constexpr int kSchemaVersion = 1;

/// Fixed CSV number format: 17 significant digits, scientific.
std::string csv_number(double x);

int cmd_certify(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_simulate(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_spectrum(const Config& cfg, const std::filesystem::path& out, std::ostream& log);

/// Dispatches by name; unknown names return kExitUsage.
int run_command(const std::string& name, const Config& cfg, const std::filesystem::path& out, std::ostream& log);

}  // namespace thermodelay
