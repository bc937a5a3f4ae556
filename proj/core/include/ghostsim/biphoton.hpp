#pragma once
#include <optional>

// Closed-form description of the double-Gaussian two-photon transverse state
// produced by collinear degenerate SPDC, restricted to one transverse
// dimension.
//
// Unit convention used across the whole library:
//   * lengths in micrometres (um),
//   * transverse momentum as transverse wavevector k = p/hbar in 1/um,
//   * uncertainty products therefore come out as dimensionless multiples of
//     hbar and never involve a stored physical constant.

namespace ghostsim {

/// Nonlinear crystal parameters entering the phase-matching function.
struct CrystalSpec {
  double length_um = 0;           ///< crystal thickness L
  double pump_wavelength_um = 0;  ///< vacuum pump wavelength
  double phase_mismatch = 0;      ///< dimensionless mismatch parameter
  /// Pump refractive index; absent means the vacuum wavevector is used.
  std::optional<double> refractive_index;

  /// Pump wavevector 2*pi*n / lambda_pump in 1/um.
  double pump_wavevector() const;
  void validate() const;
};

/// Collimated Gaussian pump envelope.
struct PumpSpec {
  double sigma_p_um = 0;  ///< 1/e^2 intensity width of the pump
  void validate() const;
};

/// The double-Gaussian joint state of the photon pair at the source plane.
///
/// The joint amplitude factorizes into a Gaussian of the sum coordinate
/// (width sigma_p) and a Gaussian of the difference coordinate (width
/// sigma_q). An optional aperture broadening r_a adds to sigma_q in
/// quadrature and is used everywhere sigma_q appears.
struct BiphotonState {
  double sigma_p = 0;     ///< sum-coordinate width, um
  double sigma_q = 0;     ///< difference-coordinate (correlation) width, um
  double wavelength = 0;  ///< signal wavelength, um (degenerate: 2x pump)
  std::optional<double> aperture_ra;  ///< optional broadening, um

  /// Effective correlation width sqrt(sigma_q^2 + r_a^2).
  double sigma_q_eff() const;
  /// True when sigma_p / sigma_q_eff >= 10, i.e. the strongly correlated
  /// regime in which the wide-pump approximations are accurate.
  bool epr_regime() const;
  void validate() const;
};

/// A normalized Gaussian probability density.
struct GaussianPdf {
  double mean = 0;
  double sd = 0;
  double operator()(double x) const;
};

/// Correlation width sqrt(L / (2 k_p)) implied by the crystal.
double sigma_q_from_crystal(const CrystalSpec& crystal);

/// Assemble the state: sigma_q from the crystal, degenerate signal
/// wavelength, aperture broadening copied through.
BiphotonState build_state(const CrystalSpec& crystal, const PumpSpec& pump,
                          std::optional<double> aperture_ra = {});

/// Joint position amplitude. Real, symmetric under exchange, normalized so
/// that the squared amplitude integrates to one over the (x_a, x_b) plane.
double joint_position_amplitude(const BiphotonState& state, double x_a,
                                double x_b);

/// Joint transverse-wavevector amplitude: the 2-D Fourier transform of the
/// position amplitude. Also real, exchange symmetric and unit normalized.
double joint_momentum_amplitude(const BiphotonState& state, double k_a,
                                double k_b);

/// Phase-matching function sinc(phi + L k^2 / k_p), with sinc(0) = 1.
double phase_matching_sinc(const CrystalSpec& crystal, double k);

/// Exact conditional position distribution of photon B given a detection of
/// photon A at x_a.
GaussianPdf conditional_position_pdf(const BiphotonState& state, double x_a);

/// Wavevector distribution of the pure conditional state. The conditional
/// amplitude is real, so the mean is zero and the width does not depend on
/// x_a: sd_k = 1 / (2 * conditional position sd).
GaussianPdf conditional_momentum_pdf(const BiphotonState& state, double x_a);

/// Unconditioned single-photon marginals of photon B.
struct SinglesPdfs {
  GaussianPdf position;  ///< sd = sqrt(sigma_p^2 + sigma_q^2) / 2
  GaussianPdf momentum;  ///< sd = sqrt(1/sigma_p^2 + 1/sigma_q^2) / 2
};
SinglesPdfs singles_pdfs(const BiphotonState& state);

/// Conditional uncertainty product Dx * Dk in units of hbar. Equals 1/2 for
/// every state and conditioning point: the conditional is a chirp-free
/// minimum-uncertainty Gaussian.
double uncertainty_product(const BiphotonState& state, double x_a);

}  // namespace ghostsim
