#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ghostsim/errors.hpp"
#include "run_config.hpp"
#include "version.hpp"

namespace {

// Exit codes: 0 success, 2 configuration error, 3 audit failure.
constexpr int kExitConfig = 2;
constexpr int kExitAudit = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ghost-diffraction simulator: SPDC photon pairs, a slit in one "
               "arm, conditional detection of the partner beam"};
  app.set_version_flag("--version", ghostsim::cli::kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::uint64_t> pairs_override;
  std::string format = "csv";

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", seed_override, "override run.seed");
    cmd->add_option("--pairs", pairs_override, "override run.pairs");
    cmd->add_option("--format", format, "output format (csv)");
  };

  auto* analytic = app.add_subcommand("analytic", "closed-form quantities only");
  auto* nearfield = app.add_subcommand("nearfield", "coincidence image of the ghost slit");
  auto* farfield = app.add_subcommand("farfield", "lens-plane momentum distributions");
  auto* scan = app.add_subcommand("scan", "widths as a function of distance");
  auto* report = app.add_subcommand("report", "conditional uncertainty product");
  auto* audit = app.add_subcommand("audit", "no-signaling check of the singles");
  for (auto* cmd : {analytic, nearfield, farfield, scan, report, audit})
    add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    ghostsim::cli::Overrides overrides;
    overrides.seed = seed_override;
    overrides.pairs = pairs_override;
    if (format != "csv")
      throw ghostsim::cli::ConfigError("--format: only 'csv' is supported");
    const ghostsim::cli::RunConfig config =
        ghostsim::cli::load_config(config_path, overrides);

    if (analytic->parsed()) ghostsim::cli::cmd_analytic(config, out_dir);
    if (nearfield->parsed()) ghostsim::cli::cmd_nearfield(config, out_dir);
    if (farfield->parsed()) ghostsim::cli::cmd_farfield(config, out_dir);
    if (scan->parsed()) ghostsim::cli::cmd_scan(config, out_dir);
    if (report->parsed()) ghostsim::cli::cmd_report(config, out_dir);
    if (audit->parsed()) ghostsim::cli::cmd_audit(config, out_dir);
    return 0;
  } catch (const ghostsim::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ghostsim::cli::AuditFailure& e) {
    std::cerr << e.what() << "\n";
    return kExitAudit;
  } catch (const ghostsim::InvalidParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
