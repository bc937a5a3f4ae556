#pragma once
// Test-only reference computations: quadrature, discrete Fourier transforms
// and sampling helpers kept independent of the library code paths they check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "ghostsim/biphoton.hpp"

namespace oracles {

inline double trapezoid(const std::function<double(double)>& f, double a,
                        double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) acc += f(a + h * static_cast<double>(i));
  return acc * h;
}

struct Stats {
  double mean = 0;
  double sd = 0;
};

inline Stats sample_stats(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s2 = 0;
  for (double x : v) s2 += (x - m) * (x - m);
  s2 /= static_cast<double>(v.size() - 1);
  return {m, std::sqrt(s2)};
}

/// Weighted first/second moments of a density sampled on a uniform grid.
inline Stats weighted_stats(const std::vector<double>& x,
                            const std::vector<double>& w) {
  double sw = 0, swx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
  }
  const double mean = swx / sw;
  double swxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    swxx += w[i] * (x[i] - mean) * (x[i] - mean);
  return {mean, std::sqrt(swxx / sw)};
}

inline ghostsim::CrystalSpec bbo_crystal() {
  ghostsim::CrystalSpec c;
  c.length_um = 3000.0;
  c.pump_wavelength_um = 0.355;
  return c;
}

/// 3 mm crystal, 355 nm pump, 450 um pump width: the reference source used
/// throughout the tests.
inline ghostsim::BiphotonState reference_state() {
  return ghostsim::build_state(bbo_crystal(), ghostsim::PumpSpec{450.0});
}

inline ghostsim::BiphotonState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ghostsim::BiphotonState s;
  s.sigma_p = std::exp(std::log(5.0) + u(rng) * (std::log(800.0) - std::log(5.0)));
  const double hi = std::min(50.0, s.sigma_p / 1.2);
  s.sigma_q = std::exp(std::log(0.5) + u(rng) * (std::log(hi) - std::log(0.5)));
  s.wavelength = 0.4 + u(rng);
  return s;
}

/// Direct 2-D grid sum of |joint_position_amplitude|^2 over a centered box.
inline double joint_norm_quadrature(const ghostsim::BiphotonState& state,
                                    double half_span, std::size_t n_per_axis) {
  const double dx = 2.0 * half_span / static_cast<double>(n_per_axis);
  double acc = 0;
  for (std::size_t i = 0; i < n_per_axis; ++i) {
    const double xa = -half_span + dx * (static_cast<double>(i) + 0.5);
    for (std::size_t j = 0; j < n_per_axis; ++j) {
      const double xb = -half_span + dx * (static_cast<double>(j) + 0.5);
      const double psi = ghostsim::joint_position_amplitude(state, xa, xb);
      acc += psi * psi;
    }
  }
  return acc * dx * dx;
}

/// Moments of the conditional slice |Psi(x_a, .)|^2 by dense quadrature.
inline Stats conditional_slice_stats(const ghostsim::BiphotonState& state,
                                     double x_a) {
  // Window generously around the conditional support.
  const auto pdf = ghostsim::conditional_position_pdf(state, x_a);
  const double lo = pdf.mean - 12.0 * pdf.sd;
  const double hi = pdf.mean + 12.0 * pdf.sd;
  const std::size_t n = 16384;
  std::vector<double> xs(n), ws(n);
  const double dx = (hi - lo) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = lo + dx * (static_cast<double>(i) + 0.5);
    const double psi = ghostsim::joint_position_amplitude(state, x_a, xs[i]);
    ws[i] = psi * psi;
  }
  return weighted_stats(xs, ws);
}

/// Marginal SD of photon B's position from |Psi|^2 by nested quadrature.
inline double marginal_position_sd(const ghostsim::BiphotonState& state) {
  const double sd_b = 0.5 * std::hypot(state.sigma_p, state.sigma_q_eff());
  const double half = 7.0 * sd_b;
  const std::size_t nb = 1200;
  std::vector<double> xb(nb), wb(nb);
  const double dxb = 2.0 * half / static_cast<double>(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    xb[j] = -half + dxb * (static_cast<double>(j) + 0.5);
    const auto pdf = ghostsim::conditional_position_pdf(state, xb[j]);
    // integrate |Psi(., xb)|^2 over x_a: exchange symmetry lets the window
    // follow the conditional of the swapped argument
    const double lo = pdf.mean - 10.0 * pdf.sd;
    const double hi = pdf.mean + 10.0 * pdf.sd;
    wb[j] = trapezoid(
        [&](double xa) {
          const double psi = ghostsim::joint_position_amplitude(state, xa, xb[j]);
          return psi * psi;
        },
        lo, hi, 2000);
  }
  return weighted_stats(xb, wb).sd;
}

/// Marginal SD of photon B's wavevector from |Phi|^2 by nested quadrature.
inline double marginal_momentum_sd(const ghostsim::BiphotonState& state) {
  const double sq = state.sigma_q_eff();
  const double sd_b = 0.5 * std::sqrt(1.0 / (state.sigma_p * state.sigma_p) +
                                      1.0 / (sq * sq));
  const double half = 7.0 * sd_b;
  const std::size_t nb = 1200;
  std::vector<double> kb(nb), wb(nb);
  const double dkb = 2.0 * half / static_cast<double>(nb);
  // For fixed k_b the integrand peaks at k_a = -k_b (sum coordinate pinched
  // by the wide pump); a window of +-10/sigma_q around it covers everything.
  const double ka_half = 10.0 / sq;
  for (std::size_t j = 0; j < nb; ++j) {
    kb[j] = -half + dkb * (static_cast<double>(j) + 0.5);
    wb[j] = trapezoid(
        [&](double ka) {
          const double phi = ghostsim::joint_momentum_amplitude(state, ka, kb[j]);
          return phi * phi;
        },
        -kb[j] - ka_half, -kb[j] + ka_half, 4000);
  }
  return weighted_stats(kb, wb).sd;
}

}  // namespace oracles
