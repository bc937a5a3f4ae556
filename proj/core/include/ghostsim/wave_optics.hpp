#pragma once
#include <complex>
#include <cstddef>
#include <vector>

#include "ghostsim/biphoton.hpp"

namespace ghostsim {

/// Uniform 1-D sampling grid. Sample i sits at x0 + i*dx; the sample count
/// must be a power of two.
struct GridSpec {
  double x0 = 0;
  double dx = 1;
  std::size_t count = 0;

  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double span() const { return dx * static_cast<double>(count); }
  void validate() const;
};

/// Uniformly sampled complex transverse amplitude of a monochromatic field.
struct ComplexField {
  double x0 = 0;          ///< coordinate of sample 0, um
  double dx = 1;          ///< grid pitch, um
  double wavelength = 1;  ///< um
  std::vector<std::complex<double>> samples;

  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double span() const { return dx * static_cast<double>(samples.size()); }

  /// sum |a_i|^2 dx
  double squared_norm() const;
  /// First moment of the intensity |a|^2.
  double intensity_mean() const;
  /// Standard deviation of the intensity distribution.
  double intensity_sd() const;
  /// Excess kurtosis of the intensity distribution (0 for a Gaussian).
  double intensity_excess_kurtosis() const;

  void validate() const;
};

/// Ideal binary slit of width d.
struct SlitAperture {
  double width = 0;   ///< d, um
  double center = 0;  ///< um
  void validate() const;
};

/// Which plane photon B is detected in.
struct PropagationSpec {
  enum class Mode { free_space, lens_fourier };
  Mode mode = Mode::free_space;
  double z = 0;      ///< free-space distance, um
  double focal = 0;  ///< lens focal length, um

  static PropagationSpec free_space(double z_um);
  static PropagationSpec lens(double focal_um);
  void validate() const;
};

/// Sample the pure conditional amplitude of photon B given x_a on the grid.
/// The result has unit squared norm. Throws SamplingError when the grid
/// cannot hold eight conditional standard deviations around the mean or when
/// dx exceeds sd/8.
ComplexField discretize_conditional(const BiphotonState& state, double x_a,
                                    const GridSpec& grid);

/// Zero every sample outside the slit. Edges snap to the nearest grid point
/// and no partial-pixel transmission is applied; the output is deliberately
/// not renormalized so the transmitted fraction stays meaningful.
ComplexField apply_slit(const ComplexField& field, const SlitAperture& slit);

/// Index range [first, last] of the samples an aperture keeps; exposes the
/// edge-snapping rule used by apply_slit.
std::pair<std::size_t, std::size_t> slit_sample_range(const ComplexField& field,
                                                      const SlitAperture& slit);

/// Paraxial free-space propagation over distance z by the spectral
/// (transfer-function) method. The grid is zero-padded to the next powers of
/// two until both the chirp-sampling bound N dx^2 >= lambda z and the span
/// rule span >= 8 x predicted output width hold; the returned field lives on
/// the padded grid. Norm is preserved.
ComplexField fresnel_propagate(const ComplexField& field, double z);

/// Field in the focal plane of an ideal lens. The output coordinate is
/// x_f = f * lambda * k / (2 pi), i.e. a scaled Fourier transform; detection
/// positions convert back with k = 2 pi x_f / (lambda f). Norm is preserved.
ComplexField lens_farfield(const ComplexField& field, double focal);

/// Gaussian-beam width law a0 * sqrt(1 + (z/zR)^2).
double beam_width(double a0, double rayleigh, double z);

/// Rayleigh range of a Gaussian beam whose intensity SD is `intensity_sd`:
/// zR = pi w0^2 / lambda with w0 = 2 sd.
double rayleigh_range(double intensity_sd, double wavelength);

/// Ghost image of a slit: rectangular transmission convolved with a Gaussian
/// point-spread function of the given SD.
struct GhostImageProfile {
  std::vector<double> x;      ///< sample positions, um
  std::vector<double> value;  ///< intensity profile, unit integral
  double sd = 0;              ///< second-moment width of the profile
};
GhostImageProfile ghost_image_profile(const SlitAperture& slit, double psf_sd,
                                      const GridSpec& grid);

/// Standard deviation of a uniform distribution of width d: d / sqrt(12).
double sd_of_uniform_slit(double d);

}  // namespace ghostsim
