#include "ghostsim/biphoton.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double CrystalSpec::pump_wavevector() const {
  const double n = refractive_index.value_or(1.0);
  return kTwoPi * n / pump_wavelength_um;
}

void CrystalSpec::validate() const {
  if (!(length_um > 0))
    throw InvalidParameterError("crystal length must be > 0 um, got " +
                                std::to_string(length_um));
  if (!(pump_wavelength_um > 0))
    throw InvalidParameterError("pump wavelength must be > 0 um, got " +
                                std::to_string(pump_wavelength_um));
  if (refractive_index && !(*refractive_index >= 1.0))
    throw InvalidParameterError("refractive index must be >= 1, got " +
                                std::to_string(*refractive_index));
  if (!std::isfinite(phase_mismatch))
    throw InvalidParameterError("phase mismatch must be finite");
}

void PumpSpec::validate() const {
  if (!(sigma_p_um > 0))
    throw InvalidParameterError("pump sigma_p must be > 0 um, got " +
                                std::to_string(sigma_p_um));
}

double BiphotonState::sigma_q_eff() const {
  if (aperture_ra) return std::hypot(sigma_q, *aperture_ra);
  return sigma_q;
}

bool BiphotonState::epr_regime() const { return sigma_p >= 10.0 * sigma_q_eff(); }

void BiphotonState::validate() const {
  if (!(sigma_p > 0))
    throw InvalidParameterError("sigma_p must be > 0 um, got " +
                                std::to_string(sigma_p));
  if (!(sigma_q > 0))
    throw InvalidParameterError("sigma_q must be > 0 um, got " +
                                std::to_string(sigma_q));
  if (!(wavelength > 0))
    throw InvalidParameterError("wavelength must be > 0 um, got " +
                                std::to_string(wavelength));
  if (aperture_ra && !(*aperture_ra >= 0))
    throw InvalidParameterError("aperture broadening r_a must be >= 0 um");
}

double GaussianPdf::operator()(double x) const {
  const double u = (x - mean) / sd;
  return std::exp(-0.5 * u * u) / (sd * std::sqrt(kTwoPi));
}

double sigma_q_from_crystal(const CrystalSpec& crystal) {
  crystal.validate();
  return std::sqrt(crystal.length_um / (2.0 * crystal.pump_wavevector()));
}

BiphotonState build_state(const CrystalSpec& crystal, const PumpSpec& pump,
                          std::optional<double> aperture_ra) {
  crystal.validate();
  pump.validate();
  BiphotonState state;
  state.sigma_p = pump.sigma_p_um;
  state.sigma_q = sigma_q_from_crystal(crystal);
  state.wavelength = 2.0 * crystal.pump_wavelength_um;
  state.aperture_ra = aperture_ra;
  state.validate();
  return state;
}

double joint_position_amplitude(const BiphotonState& state, double x_a,
                                double x_b) {
  const double sp = state.sigma_p;
  const double sq = state.sigma_q_eff();
  const double s = x_a + x_b;
  const double d = x_a - x_b;
  // 1-D normalization: integral of the squared amplitude is one.
  const double norm = 1.0 / std::sqrt(std::numbers::pi * sp * sq);
  return norm * std::exp(-s * s / (4.0 * sp * sp)) *
         std::exp(-d * d / (4.0 * sq * sq));
}

double joint_momentum_amplitude(const BiphotonState& state, double k_a,
                                double k_b) {
  const double sp = state.sigma_p;
  const double sq = state.sigma_q_eff();
  const double ks = k_a + k_b;
  const double kd = k_a - k_b;
  const double norm = std::sqrt(sp * sq / std::numbers::pi);
  return norm * std::exp(-sp * sp * ks * ks / 4.0) *
         std::exp(-sq * sq * kd * kd / 4.0);
}

double phase_matching_sinc(const CrystalSpec& crystal, double k) {
  crystal.validate();
  const double u =
      crystal.phase_mismatch + crystal.length_um * k * k / crystal.pump_wavevector();
  if (u == 0.0) return 1.0;
  return std::sin(u) / u;
}

GaussianPdf conditional_position_pdf(const BiphotonState& state, double x_a) {
  state.validate();
  const double sp2 = state.sigma_p * state.sigma_p;
  const double sq = state.sigma_q_eff();
  const double sq2 = sq * sq;
  GaussianPdf pdf;
  pdf.mean = x_a * (sp2 - sq2) / (sp2 + sq2);
  pdf.sd = state.sigma_p * sq / std::sqrt(sp2 + sq2);
  return pdf;
}

GaussianPdf conditional_momentum_pdf(const BiphotonState& state, double x_a) {
  // Real conditional amplitude: zero mean wavevector for every x_a.
  GaussianPdf pdf;
  pdf.mean = 0.0;
  pdf.sd = 1.0 / (2.0 * conditional_position_pdf(state, x_a).sd);
  return pdf;
}

SinglesPdfs singles_pdfs(const BiphotonState& state) {
  state.validate();
  const double sp = state.sigma_p;
  const double sq = state.sigma_q_eff();
  SinglesPdfs out;
  out.position = {0.0, 0.5 * std::sqrt(sp * sp + sq * sq)};
  out.momentum = {0.0, 0.5 * std::sqrt(1.0 / (sp * sp) + 1.0 / (sq * sq))};
  return out;
}

double uncertainty_product(const BiphotonState& state, double x_a) {
  return conditional_position_pdf(state, x_a).sd *
         conditional_momentum_pdf(state, x_a).sd;
}

}  // namespace ghostsim
