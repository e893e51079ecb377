#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace sbnoise::cli {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidationFailed = 2;

const std::vector<std::string>& subcommands();

// Runs one subcommand and writes its artifacts under cfg.output_dir. Returns the
// exit status; configuration problems are thrown as ConfigError.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out);

}  // namespace sbnoise::cli
