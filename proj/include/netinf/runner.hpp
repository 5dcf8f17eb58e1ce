#pragma once

#include <filesystem>

#include "netinf/config.hpp"

namespace netinf::run {

inline constexpr const char* kToolVersion = "netinf 0.1.0";

// Command implementations behind the CLI. All throw std::invalid_argument
// for configuration problems and std::runtime_error for runtime failures;
// the CLI maps those to exit codes 1 and 2.

void cmd_generate(const cfg::RunConfig& config, const std::filesystem::path& out_dir);
void cmd_train(const cfg::RunConfig& config, const std::filesystem::path& out_dir);
void cmd_infer_ols(const cfg::RunConfig& config, const std::filesystem::path& out_dir);
void cmd_analyze(const cfg::RunConfig& config, const std::filesystem::path& out_dir);
void cmd_sweep(const cfg::RunConfig& config, const std::filesystem::path& out_dir,
               int workers);

}  // namespace netinf::run
