#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "ghostsim/analysis.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/montecarlo.hpp"
#include "output.hpp"

namespace ghostsim::cli {

namespace {

using Lines = std::vector<std::pair<std::string, std::string>>;

ExperimentConfig experiment(const RunConfig& config, const PropagationSpec& plane) {
  ExperimentConfig exp;
  exp.state = config.state();
  exp.slit = config.slit;
  exp.plane = plane;
  exp.n_pairs = config.pairs;
  exp.seed = config.seed;
  exp.blur_sd = config.blur_sd_um;
  exp.position_bin = config.position_bin_um;
  exp.wavevector_bin = config.wavevector_bin_per_um;
  return exp;
}

SlitAperture require_slit(const RunConfig& config) {
  if (!config.slit)
    throw ConfigError("slit.width_um: required for this command");
  return *config.slit;
}

// Trigger-count audit: the observed fraction must sit within four standard
// errors of the closed-form rate.
void audit_trigger_rate(const RunConfig& config, const RunPlaneResult& result) {
  const double rate = expected_trigger_rate(config.state(), *config.slit);
  const double n = static_cast<double>(config.pairs);
  const double se = std::sqrt(rate * (1.0 - rate) / n);
  const double observed = static_cast<double>(result.triggers) / n;
  if (std::abs(observed - rate) > 4.0 * se) {
    std::ostringstream msg;
    msg << "audit failed: trigger-rate (observed " << observed << ", expected "
        << rate << " +- " << se << ")";
    throw AuditFailure(msg.str());
  }
}

void audit_totals(const RunPlaneResult& result, std::uint64_t pairs) {
  if (result.all_singles.total() < pairs - pairs / 1000)
    throw AuditFailure("audit failed: singles-total (detections fell outside the histogram range)");
  if (result.coincidence.total() > result.triggers)
    throw AuditFailure("audit failed: coincidence-total (more detections than triggers)");
}

std::string gaussian_fit_summary(const DetectionHistogram& hist) {
  try {
    const FitGauss fit = fit_gaussian(hist);
    return format_double(fit.sd) + " +- " + format_double(fit.ci95_sd);
  } catch (const Error& e) {
    return std::string("unavailable (") + e.what() + ")";
  }
}

PixelGrid frame_grid(const RunConfig& config, double sd_y) {
  const double half = config.frame_halfspan_um.value_or(4.0 * sd_y);
  PixelGrid grid;
  grid.ny = config.frame_rows;
  grid.dy = 2.0 * half / static_cast<double>(grid.ny);
  grid.y0 = -half;
  return grid;
}

}  // namespace

void cmd_analytic(const RunConfig& config, const std::filesystem::path& out_dir) {
  const BiphotonState state = config.state();
  const auto cond_x = conditional_position_pdf(state, 0.0);
  const auto cond_k = conditional_momentum_pdf(state, 0.0);
  const auto singles = singles_pdfs(state);
  const double zr_cond = rayleigh_range(cond_x.sd, state.wavelength);

  Lines lines;
  lines.emplace_back("sigma_q_um", format_double(state.sigma_q));
  lines.emplace_back("sigma_q_eff_um", format_double(state.sigma_q_eff()));
  lines.emplace_back("sigma_p_um", format_double(state.sigma_p));
  lines.emplace_back("signal_wavelength_um", format_double(state.wavelength));
  lines.emplace_back("epr_regime", state.epr_regime() ? "true" : "false");
  lines.emplace_back("epr_width_ratio",
                     format_double(state.sigma_p / state.sigma_q_eff()));
  lines.emplace_back("cond_position_sd_um", format_double(cond_x.sd));
  lines.emplace_back("cond_wavevector_sd_per_um", format_double(cond_k.sd));
  lines.emplace_back("singles_position_sd_um", format_double(singles.position.sd));
  lines.emplace_back("singles_wavevector_sd_per_um",
                     format_double(singles.momentum.sd));
  lines.emplace_back("product_hbar",
                     format_double(uncertainty_product(state, 0.0)));
  lines.emplace_back("rayleigh_range_um", format_double(zr_cond));
  if (config.slit) {
    lines.emplace_back("ghost_image_sd_um",
                       format_double(std::sqrt(cond_x.sd * cond_x.sd +
                                               config.slit->width *
                                                   config.slit->width / 12.0)));
    lines.emplace_back("slit_sd_um", format_double(sd_of_uniform_slit(config.slit->width)));
    lines.emplace_back("trigger_rate",
                       format_double(expected_trigger_rate(state, *config.slit)));
  }
  if (!state.epr_regime())
    lines.emplace_back("note",
                       "sigma_p/sigma_q_eff < 10: wide-pump approximations are "
                       "inaccurate; conditional formulas stay exact");

  OutputDir out(out_dir, config_digest(config), config.seed);
  out.write_report("analytic.txt", lines);
  out.write_manifest();
  std::cout << "analytic: product_hbar = "
            << format_double(uncertainty_product(state, 0.0)) << ", sigma_q = "
            << format_double(state.sigma_q) << " um\n";
}

void cmd_nearfield(const RunConfig& config, const std::filesystem::path& out_dir) {
  require_slit(config);
  const auto exp = experiment(config, PropagationSpec::free_space(config.plane_z_um()));
  const RunPlaneResult result = run_plane(exp);
  audit_totals(result, config.pairs);
  audit_trigger_rate(config, result);
  if (result.empty_coincidence)
    throw AuditFailure("audit failed: empty-coincidence (no pair triggered)");

  const SdEstimate cond = estimate_sd_ci(result.coincidence);
  const SdEstimate singles = estimate_sd_ci(result.all_singles);
  const FrameImage frame = synthesize_frame(
      result.coincidence, exp.state,
      frame_grid(config, conditional_position_pdf(exp.state, 0.0).sd), config.seed);

  OutputDir out(out_dir, config_digest(config), config.seed);
  out.write_histogram_csv("coincidence.csv", result.coincidence);
  out.write_histogram_csv("singles.csv", result.all_singles);
  out.write_frame_pgm("frame.pgm", frame);
  Lines lines;
  lines.emplace_back("plane_z_mm", format_double(config.plane_z_mm));
  lines.emplace_back("triggers", std::to_string(result.triggers));
  lines.emplace_back("cond_sd_um", format_double(cond.sd));
  lines.emplace_back("cond_sd_ci95_um", format_double(cond.ci_halfwidth()));
  lines.emplace_back("cond_sd_gaussfit_um", gaussian_fit_summary(result.coincidence));
  lines.emplace_back("singles_sd_um", format_double(singles.sd));
  lines.emplace_back("singles_sd_ci95_um", format_double(singles.ci_halfwidth()));
  out.write_report("summary.txt", lines);
  out.write_manifest();
  std::cout << "nearfield: cond_sd = " << format_double(cond.sd)
            << " um, singles_sd = " << format_double(singles.sd) << " um, triggers = "
            << result.triggers << "\n";
}

void cmd_farfield(const RunConfig& config, const std::filesystem::path& out_dir) {
  require_slit(config);
  const auto exp = experiment(config, PropagationSpec::lens(config.focal_um()));
  const RunPlaneResult result = run_plane(exp);
  audit_totals(result, config.pairs);
  audit_trigger_rate(config, result);
  if (result.empty_coincidence)
    throw AuditFailure("audit failed: empty-coincidence (no pair triggered)");

  const SdEstimate cond = estimate_sd_ci(result.coincidence);
  const SdEstimate singles = estimate_sd_ci(result.all_singles);

  OutputDir out(out_dir, config_digest(config), config.seed);
  out.write_histogram_csv("coincidence.csv", result.coincidence);
  out.write_histogram_csv("singles.csv", result.all_singles);
  Lines lines;
  lines.emplace_back("focal_mm", format_double(config.focal_mm));
  lines.emplace_back("triggers", std::to_string(result.triggers));
  lines.emplace_back("cond_sd_k_per_um", format_double(cond.sd));
  lines.emplace_back("cond_sd_k_ci95_per_um", format_double(cond.ci_halfwidth()));
  lines.emplace_back("cond_sd_k_gaussfit_per_um",
                     gaussian_fit_summary(result.coincidence));
  lines.emplace_back("singles_sd_k_per_um", format_double(singles.sd));
  lines.emplace_back("singles_sd_k_ci95_per_um",
                     format_double(singles.ci_halfwidth()));
  lines.emplace_back("cond_to_singles_ratio", format_double(cond.sd / singles.sd));
  out.write_report("summary.txt", lines);
  out.write_manifest();
  std::cout << "farfield: cond_sd_k = " << format_double(cond.sd)
            << " 1/um, singles_sd_k = " << format_double(singles.sd)
            << " 1/um, ratio = " << format_double(cond.sd / singles.sd) << "\n";
}

void cmd_scan(const RunConfig& config, const std::filesystem::path& out_dir) {
  require_slit(config);
  if (config.scan_z_mm.empty())
    throw ConfigError("scan.z_list_mm: required for the scan command");
  const auto exp = experiment(config, PropagationSpec::free_space(0.0));
  std::vector<double> z_um;
  for (double z : config.scan_z_mm) z_um.push_back(1000.0 * z);
  const auto points = scan_z(exp, z_um);

  std::vector<WidthPoint> fit_points;
  for (const auto& p : points) fit_points.push_back({p.z, p.cond_sd, p.cond_ci});

  OutputDir out(out_dir, config_digest(config), config.seed);
  out.write_widths_csv("widths.csv", points);
  Lines lines;
  try {
    const BeamFit fit = fit_beam_widths(fit_points);
    lines.emplace_back("a0_um", format_double(fit.a0));
    lines.emplace_back("a0_ci95_um", format_double(fit.ci95_a0));
    lines.emplace_back("rayleigh_um", format_double(fit.rayleigh));
    lines.emplace_back("rayleigh_ci95_um", format_double(fit.ci95_rayleigh));
    lines.emplace_back("residual_norm", format_double(fit.residual_norm));
    std::cout << "scan: a0 = " << format_double(fit.a0) << " um, zR = "
              << format_double(fit.rayleigh) << " um\n";
  } catch (const Error& e) {
    lines.emplace_back("fit_error", e.what());
    std::cout << "scan: beam fit failed: " << e.what() << "\n";
  }
  lines.emplace_back(
      "rayleigh_predicted_um",
      format_double(rayleigh_range(conditional_position_pdf(exp.state, 0.0).sd,
                                   exp.state.wavelength)));
  out.write_report("beamfit.txt", lines);
  out.write_manifest();
}

void cmd_report(const RunConfig& config, const std::filesystem::path& out_dir) {
  require_slit(config);
  const auto near_exp =
      experiment(config, PropagationSpec::free_space(config.plane_z_um()));
  const RunPlaneResult near_result = run_plane(near_exp);
  audit_totals(near_result, config.pairs);
  audit_trigger_rate(config, near_result);

  const auto far_exp = experiment(config, PropagationSpec::lens(config.focal_um()));
  const RunPlaneResult far_result = run_plane(far_exp);
  audit_totals(far_result, config.pairs);

  const SdEstimate near_sd = estimate_sd_ci(near_result.coincidence);
  const SdEstimate far_sd = estimate_sd_ci(far_result.coincidence);
  const UncertaintyReport report = build_uncertainty_report(
      {near_sd.sd, near_sd.ci_halfwidth()}, {far_sd.sd, far_sd.ci_halfwidth()},
      "near-field and lens-plane coincidence histograms, moment estimator");

  if (report.product_hbar + 3.0 * report.ci95 < 0.5)
    throw AuditFailure("audit failed: uncertainty-bound (product " +
                       format_double(report.product_hbar) + " + 3 CI below 0.5)");

  OutputDir out(out_dir, config_digest(config), config.seed);
  out.write_histogram_csv("near_coincidence.csv", near_result.coincidence);
  out.write_histogram_csv("near_singles.csv", near_result.all_singles);
  out.write_histogram_csv("far_coincidence.csv", far_result.coincidence);
  out.write_histogram_csv("far_singles.csv", far_result.all_singles);
  Lines lines;
  lines.emplace_back("dx_cond_um", format_double(report.dx_cond));
  lines.emplace_back("dx_cond_ci95_um", format_double(near_sd.ci_halfwidth()));
  lines.emplace_back("dx_cond_gaussfit_um",
                     gaussian_fit_summary(near_result.coincidence));
  lines.emplace_back("dk_cond_per_um", format_double(report.dk_cond));
  lines.emplace_back("dk_cond_ci95_per_um", format_double(far_sd.ci_halfwidth()));
  lines.emplace_back("dk_cond_gaussfit_per_um",
                     gaussian_fit_summary(far_result.coincidence));
  lines.emplace_back("product_hbar", format_double(report.product_hbar));
  lines.emplace_back("product_ci95_hbar", format_double(report.ci95));
  lines.emplace_back("hup_violation_flag", report.violation ? "true" : "false");
  lines.emplace_back("inputs", report.inputs);
  out.write_report("report.txt", lines);
  out.write_manifest();
  std::cout << "report: product = " << format_double(report.product_hbar)
            << " +- " << format_double(report.ci95) << " hbar\n";
}

void cmd_audit(const RunConfig& config, const std::filesystem::path& out_dir) {
  const SlitAperture slit = require_slit(config);
  const PropagationSpec plane =
      config.plane_mode == "lens-fourier"
          ? PropagationSpec::lens(config.focal_um())
          : PropagationSpec::free_space(config.plane_z_um());
  const AuditReport report =
      no_signaling_audit(config.state(), slit, plane, config.pairs, config.seed);

  OutputDir out(out_dir, config_digest(config), config.seed);
  out.write_audit_csv("audit.csv", report.singles);
  Lines lines;
  lines.emplace_back("plane", config.plane_mode);
  lines.emplace_back("n_pairs", std::to_string(report.n_pairs));
  lines.emplace_back("triggers", std::to_string(report.triggers));
  lines.emplace_back("max_deviation_ratio", format_double(report.singles.max_ratio));
  lines.emplace_back("partition_exact", report.partition_ok ? "true" : "false");
  lines.emplace_back("pass", report.pass ? "true" : "false");
  out.write_report("audit.txt", lines);
  out.write_manifest();
  std::cout << "audit: max deviation ratio = "
            << format_double(report.singles.max_ratio)
            << (report.pass ? " (pass)\n" : " (FAIL)\n");

  if (!report.partition_ok)
    throw AuditFailure("audit failed: singles-partition (triggered + untriggered != all)");
  if (!report.singles.pass)
    throw AuditFailure("audit failed: no-signaling (per-bin fluctuation bound exceeded)");
}

}  // namespace ghostsim::cli
