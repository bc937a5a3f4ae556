#pragma once
#include <filesystem>
#include <stdexcept>

#include "run_config.hpp"

namespace ghostsim::cli {

/// An internal invariant audit failed after a run; maps to exit code 3.
struct AuditFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void cmd_analytic(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_nearfield(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_farfield(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_scan(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_report(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_audit(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace ghostsim::cli
