#include "ghostsim/wave_optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft_internal.hpp"
#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxFieldSamples = std::size_t{1} << 22;

bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2)); }

// Signed spectral coordinate of DFT bin j for an N-point grid of pitch dx.
double dft_wavevector(std::size_t j, std::size_t n, double dx) {
  const auto half = n / 2;
  const double idx = (j < half) ? static_cast<double>(j)
                                : static_cast<double>(j) - static_cast<double>(n);
  return kTwoPi * idx / (dx * static_cast<double>(n));
}

}  // namespace

void GridSpec::validate() const {
  if (!(dx > 0)) throw InvalidParameterError("grid pitch dx must be > 0");
  if (!is_pow2(count))
    throw InvalidParameterError("grid sample count must be a power of two >= 2, got " +
                                std::to_string(count));
}

double ComplexField::squared_norm() const {
  double acc = 0;
  for (const auto& a : samples) acc += std::norm(a);
  return acc * dx;
}

double ComplexField::intensity_mean() const {
  double w = 0, wx = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double p = std::norm(samples[i]);
    w += p;
    wx += p * x(i);
  }
  return wx / w;
}

double ComplexField::intensity_sd() const {
  const double mean = intensity_mean();
  double w = 0, wxx = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double p = std::norm(samples[i]);
    const double u = x(i) - mean;
    w += p;
    wxx += p * u * u;
  }
  return std::sqrt(wxx / w);
}

double ComplexField::intensity_excess_kurtosis() const {
  const double mean = intensity_mean();
  double w = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double p = std::norm(samples[i]);
    const double u = x(i) - mean;
    w += p;
    m2 += p * u * u;
    m4 += p * u * u * u * u;
  }
  m2 /= w;
  m4 /= w;
  return m4 / (m2 * m2) - 3.0;
}

void ComplexField::validate() const {
  if (!(dx > 0)) throw InvalidParameterError("field pitch dx must be > 0");
  if (!(wavelength > 0)) throw InvalidParameterError("field wavelength must be > 0");
  if (!is_pow2(samples.size()))
    throw InvalidParameterError("field sample count must be a power of two >= 2, got " +
                                std::to_string(samples.size()));
  if (!std::isfinite(squared_norm()))
    throw InvalidParameterError("field squared norm is not finite");
}

void SlitAperture::validate() const {
  if (!(width > 0)) throw InvalidParameterError("slit width must be > 0 um");
  if (!std::isfinite(center)) throw InvalidParameterError("slit center must be finite");
}

PropagationSpec PropagationSpec::free_space(double z_um) {
  PropagationSpec s;
  s.mode = Mode::free_space;
  s.z = z_um;
  s.validate();
  return s;
}

PropagationSpec PropagationSpec::lens(double focal_um) {
  PropagationSpec s;
  s.mode = Mode::lens_fourier;
  s.focal = focal_um;
  s.validate();
  return s;
}

void PropagationSpec::validate() const {
  if (mode == Mode::free_space) {
    if (!(z >= 0)) throw InvalidParameterError("propagation distance z must be >= 0");
  } else {
    if (!(focal > 0)) throw InvalidParameterError("lens focal length must be > 0");
  }
}

ComplexField discretize_conditional(const BiphotonState& state, double x_a,
                                    const GridSpec& grid) {
  grid.validate();
  const GaussianPdf pdf = conditional_position_pdf(state, x_a);
  const double lo_needed = pdf.mean - 4.0 * pdf.sd;
  const double hi_needed = pdf.mean + 4.0 * pdf.sd;
  const double grid_hi = grid.x0 + grid.span();
  if (grid.span() < 8.0 * pdf.sd || grid.x0 > lo_needed || grid_hi < hi_needed) {
    std::ostringstream msg;
    msg << "grid [" << grid.x0 << ", " << grid_hi << "] um cannot hold 8 conditional"
        << " SDs: need [" << lo_needed << ", " << hi_needed << "] um";
    throw SamplingError(msg.str());
  }
  if (grid.dx > pdf.sd / 8.0) {
    std::ostringstream msg;
    msg << "grid pitch " << grid.dx << " um under-samples the conditional state: need dx <= "
        << pdf.sd / 8.0 << " um";
    throw SamplingError(msg.str());
  }

  ComplexField field;
  field.x0 = grid.x0;
  field.dx = grid.dx;
  field.wavelength = state.wavelength;
  field.samples.resize(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double u = (grid.x(i) - pdf.mean) / pdf.sd;
    field.samples[i] = std::exp(-u * u / 4.0);  // amplitude, |a|^2 has SD pdf.sd
  }
  const double norm = std::sqrt(field.squared_norm());
  for (auto& a : field.samples) a /= norm;
  return field;
}

std::pair<std::size_t, std::size_t> slit_sample_range(const ComplexField& field,
                                                      const SlitAperture& slit) {
  slit.validate();
  const auto n = static_cast<long long>(field.samples.size());
  const long long i_lo =
      std::llround((slit.center - 0.5 * slit.width - field.x0) / field.dx);
  const long long i_hi =
      std::llround((slit.center + 0.5 * slit.width - field.x0) / field.dx);
  if (i_hi < 0 || i_lo > n - 1)
    throw InvalidGeometryError("slit lies entirely outside the sampled grid");
  return {static_cast<std::size_t>(std::max(0ll, i_lo)),
          static_cast<std::size_t>(std::min(n - 1, i_hi))};
}

ComplexField apply_slit(const ComplexField& field, const SlitAperture& slit) {
  field.validate();
  const auto [first, last] = slit_sample_range(field, slit);
  ComplexField out = field;
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    if (i < first || i > last) out.samples[i] = 0.0;
  return out;
}

ComplexField fresnel_propagate(const ComplexField& field, double z) {
  field.validate();
  if (!(z >= 0)) throw InvalidParameterError("propagation distance z must be >= 0");
  if (z == 0.0) return field;
  if (!(field.squared_norm() > 0))
    throw InvalidParameterError("cannot propagate a field with zero norm");

  // Grid sizing: the chirp-sampling bound N dx^2 >= lambda z plus enough span
  // for the diffracted beam (8 predicted output SDs).
  const double sd_in = field.intensity_sd();
  const double sd_out = beam_width(sd_in, rayleigh_range(sd_in, field.wavelength), z);
  const double min_span = std::max(field.span(), 8.0 * sd_out);
  std::size_t n = field.samples.size();
  while (static_cast<double>(n) * field.dx * field.dx < field.wavelength * z ||
         static_cast<double>(n) * field.dx < min_span) {
    n <<= 1;
    if (n > kMaxFieldSamples) {
      std::ostringstream msg;
      msg << "anti-aliasing bound unsatisfiable within padding limit: need N >= "
          << std::max(field.wavelength * z / (field.dx * field.dx),
                      min_span / field.dx)
          << " samples at dx = " << field.dx << " um, limit " << kMaxFieldSamples;
      throw SamplingError(msg.str());
    }
  }

  ComplexField out;
  out.dx = field.dx;
  out.wavelength = field.wavelength;
  const std::size_t pad_left = (n - field.samples.size()) / 2;
  out.x0 = field.x0 - field.dx * static_cast<double>(pad_left);
  out.samples.assign(n, 0.0);
  std::copy(field.samples.begin(), field.samples.end(),
            out.samples.begin() + static_cast<std::ptrdiff_t>(pad_left));

  detail::fft_inplace(out.samples, false);
  const double chirp = field.wavelength * z / (2.0 * kTwoPi);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = dft_wavevector(j, n, out.dx);
    out.samples[j] *= std::polar(1.0, -chirp * k * k);
  }
  detail::fft_inplace(out.samples, true);
  return out;
}

ComplexField lens_farfield(const ComplexField& field, double focal) {
  field.validate();
  if (!(focal > 0)) throw InvalidParameterError("lens focal length must be > 0");

  const std::size_t n = field.samples.size();
  std::vector<std::complex<double>> spectrum = field.samples;
  detail::fft_inplace(spectrum, false);

  // Focal-plane coordinate x_f = f lambda k / (2 pi); reorder so the output
  // grid runs from the most negative spectral bin upward.
  const double dk = kTwoPi / (field.dx * static_cast<double>(n));
  const double scale = focal * field.wavelength / kTwoPi;
  ComplexField out;
  out.wavelength = field.wavelength;
  out.dx = scale * dk;
  out.x0 = -scale * dk * static_cast<double>(n / 2);
  out.samples.resize(n);
  // Amplitude scale chosen so the squared norm is preserved on the new grid.
  const double amp = std::sqrt(field.dx / (static_cast<double>(n) * out.dx));
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t j = (m + n / 2) % n;  // centered order
    const double k = dft_wavevector(j, n, field.dx);
    out.samples[m] = amp * std::polar(1.0, -k * field.x0) * spectrum[j];
  }
  return out;
}

double beam_width(double a0, double rayleigh, double z) {
  if (!(a0 > 0) || !(rayleigh > 0))
    throw InvalidParameterError("beam_width requires a0 > 0 and zR > 0");
  const double r = z / rayleigh;
  return a0 * std::sqrt(1.0 + r * r);
}

double rayleigh_range(double intensity_sd, double wavelength) {
  if (!(intensity_sd > 0) || !(wavelength > 0))
    throw InvalidParameterError("rayleigh_range requires positive inputs");
  const double w0 = 2.0 * intensity_sd;
  return std::numbers::pi * w0 * w0 / wavelength;
}

GhostImageProfile ghost_image_profile(const SlitAperture& slit, double psf_sd,
                                      const GridSpec& grid) {
  slit.validate();
  grid.validate();
  if (!(psf_sd > 0)) throw InvalidParameterError("PSF sd must be > 0");

  GhostImageProfile out;
  out.x.resize(grid.count);
  out.value.resize(grid.count);
  const double a = slit.center - 0.5 * slit.width;
  const double b = slit.center + 0.5 * slit.width;
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double x = grid.x(i);
    out.x[i] = x;
    out.value[i] =
        (normal_cdf((x - a) / psf_sd) - normal_cdf((x - b) / psf_sd)) / slit.width;
  }
  double w = 0, wx = 0;
  for (std::size_t i = 0; i < grid.count; ++i) {
    w += out.value[i];
    wx += out.value[i] * out.x[i];
  }
  const double mean = wx / w;
  double wxx = 0;
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double u = out.x[i] - mean;
    wxx += out.value[i] * u * u;
  }
  out.sd = std::sqrt(wxx / w);
  const double integral = w * grid.dx;
  for (auto& v : out.value) v /= integral;
  return out;
}

double sd_of_uniform_slit(double d) {
  if (!(d > 0)) throw InvalidParameterError("slit width must be > 0");
  return d / std::sqrt(12.0);
}

}  // namespace ghostsim
