#include "ghostsim/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

// Wilson-Hilferty approximation of the chi-square quantile with k degrees of
// freedom at the normal deviate z; accurate to a few 1e-4 relative for the
// large k used here (the estimator requires >= 100 counts).
double chi2_quantile(double z, double k) {
  const double c = 2.0 / (9.0 * k);
  const double t = 1.0 - c + z * std::sqrt(c);
  return k * t * t * t;
}

struct Moments {
  double mean = 0;
  double var = 0;  // unbiased, Sheppard-corrected
  std::uint64_t n = 0;
  std::size_t occupied = 0;
};

Moments histogram_moments(const DetectionHistogram& hist) {
  Moments m;
  double wx = 0;
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    if (hist.counts[i] == 0) continue;
    ++m.occupied;
    m.n += hist.counts[i];
    wx += static_cast<double>(hist.counts[i]) * hist.bin_center(i);
  }
  if (m.n == 0) return m;
  m.mean = wx / static_cast<double>(m.n);
  double wxx = 0;
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    if (hist.counts[i] == 0) continue;
    const double u = hist.bin_center(i) - m.mean;
    wxx += static_cast<double>(hist.counts[i]) * u * u;
  }
  m.var = wxx / static_cast<double>(m.n - 1) -
          hist.bin_width * hist.bin_width / 12.0;
  return m;
}

}  // namespace

SdEstimate estimate_sd_ci(const DetectionHistogram& hist) {
  const Moments m = histogram_moments(hist);
  if (m.n < 100)
    throw TooFewCountsError("SD estimate needs >= 100 counts, histogram has " +
                            std::to_string(m.n));
  if (m.occupied < 2)
    throw TooFewCountsError(
        "histogram is concentrated in a single bin; width is not resolvable");
  if (!(m.var > 0))
    throw TooFewCountsError("variance vanishes after bin-width correction");

  SdEstimate est;
  est.n = m.n;
  est.sd = std::sqrt(m.var);
  const double k = static_cast<double>(m.n - 1);
  est.ci_lo = est.sd * std::sqrt(k / chi2_quantile(+kZ95, k));
  est.ci_hi = est.sd * std::sqrt(k / chi2_quantile(-kZ95, k));
  return est;
}

FitGauss fit_gaussian(const DetectionHistogram& hist) {
  const Moments m = histogram_moments(hist);
  if (m.occupied < 3)
    throw TooFewCountsError("Gaussian fit needs >= 3 occupied bins, got " +
                            std::to_string(m.occupied));

  const std::size_t nbins = hist.counts.size();
  const double span = hist.bin_width * static_cast<double>(nbins);

  // Counts are scaled to a peak near one so the three parameters share a
  // common magnitude; otherwise the normal equations are too ill-conditioned
  // to polish the optimum.
  double peak = 0;
  for (auto c : hist.counts) peak = std::max(peak, static_cast<double>(c));
  std::vector<double> scaled(nbins);
  for (std::size_t i = 0; i < nbins; ++i)
    scaled[i] = static_cast<double>(hist.counts[i]) / peak;

  double amplitude = 1.0;
  double mean = m.mean;
  double sd = std::sqrt(std::max(m.var, hist.bin_width * hist.bin_width));

  const auto model = [&](double a, double mu, double s, double x) {
    const double u = (x - mu) / s;
    return a * std::exp(-0.5 * u * u);
  };
  const auto ssr = [&](double a, double mu, double s) {
    double acc = 0;
    for (std::size_t i = 0; i < nbins; ++i) {
      const double r = model(a, mu, s, hist.bin_center(i)) - scaled[i];
      acc += r * r;
    }
    return acc;
  };

  // Levenberg-Marquardt on (amplitude, mean, sd).
  double lambda = 1e-3;
  double current = ssr(amplitude, mean, sd);
  int iter = 0;
  constexpr int kMaxIter = 200;
  for (; iter < kMaxIter; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < nbins; ++i) {
      const double x = hist.bin_center(i);
      const double u = (x - mean) / sd;
      const double g = std::exp(-0.5 * u * u);
      const double f = amplitude * g;
      Eigen::Vector3d jac(g, f * u / sd, f * u * u / sd);
      const double r = f - scaled[i];
      jtj += jac * jac.transpose();
      jtr += jac * r;
    }
    Eigen::Matrix3d damped = jtj;
    for (int d = 0; d < 3; ++d) damped(d, d) *= 1.0 + lambda;
    const Eigen::Vector3d step = damped.fullPivLu().solve(-jtr);
    if (!step.allFinite())
      throw FitFailureError("Gaussian fit produced a non-finite step");

    const double a2 = amplitude + step(0);
    const double m2 = mean + step(1);
    const double s2 = sd + step(2);
    if (!(s2 > 0) || !(a2 > 0)) {
      lambda *= 10.0;
      if (lambda > 1e12)
        throw FitFailureError("Gaussian fit cannot keep parameters positive");
      continue;
    }
    const double next = ssr(a2, m2, s2);
    if (next <= current) {
      const double rel = std::abs(next - current) / std::max(current, 1e-300);
      amplitude = a2;
      mean = m2;
      sd = s2;
      current = next;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (rel < 1e-14 && step.norm() < 1e-10 * (1.0 + sd)) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  if (iter == kMaxIter) {
    std::ostringstream msg;
    msg << "Gaussian fit did not converge after " << kMaxIter
        << " iterations (sd = " << sd << ", ssr = " << current << ")";
    throw FitFailureError(msg.str());
  }
  if (!(sd > 0) || sd > span)
    throw FitFailureError(
        "fitted width is not identifiable: sd spans the whole grid");

  // Parameter covariance from the local quadratic model at the optimum.
  Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < nbins; ++i) {
    const double x = hist.bin_center(i);
    const double u = (x - mean) / sd;
    const double g = std::exp(-0.5 * u * u);
    const double f = amplitude * g;
    Eigen::Vector3d jac(g, f * u / sd, f * u * u / sd);
    jtj += jac * jac.transpose();
  }
  const double dof = static_cast<double>(nbins > 3 ? nbins - 3 : 1);
  const double s2hat = current / dof;
  const Eigen::Matrix3d cov = s2hat * jtj.fullPivLu().inverse();
  if (!cov.allFinite())
    throw FitFailureError("Gaussian fit covariance is singular");

  FitGauss fit;
  fit.amplitude = amplitude * peak;
  fit.mean = mean;
  fit.sd = sd;
  fit.ci95_amplitude = peak * kZ95 * std::sqrt(std::max(0.0, cov(0, 0)));
  fit.ci95_mean = kZ95 * std::sqrt(std::max(0.0, cov(1, 1)));
  fit.ci95_sd = kZ95 * std::sqrt(std::max(0.0, cov(2, 2)));
  fit.residual_norm = peak * std::sqrt(current);
  fit.iterations = iter;
  if (fit.ci95_sd > span)
    throw FitFailureError("fitted width CI spans the whole grid");
  return fit;
}

BeamFit fit_beam_widths(const std::vector<WidthPoint>& points) {
  if (points.size() < 3)
    throw InvalidParameterError("beam-width fit needs >= 3 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].width > 0))
      throw InvalidParameterError("beam widths must be > 0");
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i].z == points[j].z)
        throw InvalidParameterError("beam-width fit needs distinct z values");
  }

  // Linear weighted least squares in the squared domain:
  //   width^2 = b0 + b1 * z^2,   a0 = sqrt(b0),  zR = sqrt(b0/b1).
  // z^2 is rescaled to order one before solving; the raw design matrix can
  // span eighteen decades and defeats the pivot threshold.
  const bool weighted =
      std::all_of(points.begin(), points.end(), [](const WidthPoint& p) {
        return p.ci > 0;
      });
  double u_scale = 0;
  for (const auto& p : points) u_scale = std::max(u_scale, p.z * p.z);
  if (u_scale == 0) u_scale = 1.0;

  Eigen::Matrix2d xtwx = Eigen::Matrix2d::Zero();
  Eigen::Vector2d xtwy = Eigen::Vector2d::Zero();
  for (const auto& p : points) {
    const double u = p.z * p.z / u_scale;
    const double y = p.width * p.width;
    const double sigma_y = weighted ? 2.0 * p.width * (p.ci / kZ95) : 1.0;
    const double w = 1.0 / (sigma_y * sigma_y);
    Eigen::Vector2d row(1.0, u);
    xtwx += w * row * row.transpose();
    xtwy += w * row * y;
  }
  const Eigen::Vector2d beta = xtwx.fullPivLu().solve(xtwy);
  const double b0 = beta(0);
  const double b1 = beta(1) / u_scale;
  if (!(b0 > 0) || !(b1 > 0))
    throw FitFailureError(
        "beam-width data are inconsistent with a0 sqrt(1+(z/zR)^2): "
        "non-positive fitted intercept or slope");

  double ssr = 0, syy = 0;
  for (const auto& p : points) {
    const double u = p.z * p.z;
    const double y = p.width * p.width;
    const double r = y - (b0 + b1 * u);
    ssr += r * r;
    syy += y * y;
  }

  Eigen::Matrix2d cov = xtwx.fullPivLu().inverse();
  if (!weighted) {
    const double dof = static_cast<double>(points.size() - 2);
    cov *= ssr / dof;
  }
  // back to the unscaled slope
  cov(0, 1) /= u_scale;
  cov(1, 0) /= u_scale;
  cov(1, 1) /= u_scale * u_scale;

  BeamFit fit;
  fit.a0 = std::sqrt(b0);
  fit.rayleigh = std::sqrt(b0 / b1);
  fit.residual_norm = std::sqrt(ssr / syy);
  // First-order propagation through a0 = sqrt(b0), zR = sqrt(b0/b1).
  const double var_a0 = cov(0, 0) / (4.0 * b0);
  const Eigen::Vector2d grad(1.0 / (2.0 * std::sqrt(b0 * b1)),
                             -std::sqrt(b0) / (2.0 * b1 * std::sqrt(b1)));
  const double var_zr = grad.transpose() * cov * grad;
  fit.ci95_a0 = kZ95 * std::sqrt(std::max(0.0, var_a0));
  fit.ci95_rayleigh = kZ95 * std::sqrt(std::max(0.0, var_zr));
  return fit;
}

UncertaintyReport build_uncertainty_report(const ValueCi& near_sd,
                                           const ValueCi& far_sd_k,
                                           std::string inputs) {
  if (!(near_sd.value > 0) || !(far_sd_k.value > 0))
    throw InvalidParameterError("uncertainty report needs positive widths");
  if (near_sd.ci < 0 || far_sd_k.ci < 0)
    throw InvalidParameterError("CI halfwidths must be >= 0");

  UncertaintyReport report;
  report.dx_cond = near_sd.value;
  report.dk_cond = far_sd_k.value;
  report.product_hbar = near_sd.value * far_sd_k.value;
  const double rel = std::hypot(near_sd.ci / near_sd.value,
                                far_sd_k.ci / far_sd_k.value);
  report.ci95 = report.product_hbar * rel;
  report.violation = report.product_hbar + report.ci95 < 0.5;
  report.inputs = std::move(inputs);
  return report;
}

}  // namespace ghostsim
