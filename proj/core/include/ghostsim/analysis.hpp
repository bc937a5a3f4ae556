#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "ghostsim/montecarlo.hpp"

namespace ghostsim {

/// Moment-based SD of a histogram with a chi-square 95% confidence interval
/// (Gaussian-population assumption). Sheppard's correction for the finite bin
/// width is applied to the variance.
struct SdEstimate {
  double sd = 0;
  double ci_lo = 0;  ///< lower 95% bound
  double ci_hi = 0;  ///< upper 95% bound
  std::uint64_t n = 0;

  double ci_halfwidth() const { return 0.5 * (ci_hi - ci_lo); }
};
SdEstimate estimate_sd_ci(const DetectionHistogram& hist);

/// Least-squares Gaussian fit to bin counts; CIs from the local quadratic
/// model of the objective around the optimum.
struct FitGauss {
  double amplitude = 0;
  double mean = 0;
  double sd = 0;
  double ci95_amplitude = 0;  ///< 95% halfwidths
  double ci95_mean = 0;
  double ci95_sd = 0;
  double residual_norm = 0;
  int iterations = 0;
};
FitGauss fit_gaussian(const DetectionHistogram& hist);

/// One width measurement for the beam-width fit; ci = 95% CI halfwidth
/// (zero means equal weights).
struct WidthPoint {
  double z = 0;
  double width = 0;
  double ci = 0;
};

/// Weighted least-squares fit of a(z) = a0 sqrt(1 + (z/zR)^2), done in the
/// squared domain a^2 = a0^2 + (a0/zR)^2 z^2 where the model is exactly
/// linear in z^2.
struct BeamFit {
  double a0 = 0;
  double rayleigh = 0;
  double ci95_a0 = 0;
  double ci95_rayleigh = 0;
  double residual_norm = 0;  ///< relative rms residual in the squared domain
};
BeamFit fit_beam_widths(const std::vector<WidthPoint>& points);

/// A value with a 95% CI halfwidth.
struct ValueCi {
  double value = 0;
  double ci = 0;
};

/// Conditional uncertainty product in hbar units with first-order error
/// propagation.
struct UncertaintyReport {
  double dx_cond = 0;       ///< um
  double dk_cond = 0;       ///< 1/um
  double product_hbar = 0;  ///< dx_cond * dk_cond
  double ci95 = 0;          ///< propagated 95% halfwidth
  /// True when even the CI upper bound sits below the hbar/2 floor, i.e. the
  /// inputs are inconsistent with the uncertainty bound.
  bool violation = false;
  std::string inputs;  ///< provenance of the two widths
};
UncertaintyReport build_uncertainty_report(const ValueCi& near_sd,
                                           const ValueCi& far_sd_k,
                                           std::string inputs = {});

}  // namespace ghostsim
