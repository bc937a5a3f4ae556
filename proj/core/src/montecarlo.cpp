#include "ghostsim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ghostsim/analysis.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/rng.hpp"

namespace ghostsim {

namespace {

constexpr double kDefaultPositionBin = 0.5;     // um
constexpr double kDefaultWavevectorBin = 5e-4;  // 1/um

struct HistSpec {
  double lo = 0;
  double bin = 1;
  std::size_t nbins = 0;
  bool k_units = false;

  static HistSpec centered(double mean, double sd, double bin, bool k_units) {
    HistSpec s;
    s.bin = bin;
    s.k_units = k_units;
    const double half = 8.0 * sd;
    s.nbins = static_cast<std::size_t>(std::ceil(2.0 * half / bin));
    s.lo = mean - 0.5 * s.bin * static_cast<double>(s.nbins);
    return s;
  }
};

DetectionHistogram make_histogram(const HistSpec& spec, HistKind kind,
                                  std::uint64_t n_trials) {
  DetectionHistogram h;
  h.lo = spec.lo;
  h.bin_width = spec.bin;
  h.counts.assign(spec.nbins, 0);
  h.n_trials = n_trials;
  h.kind = kind;
  h.k_units = spec.k_units;
  return h;
}

struct Campaign {
  DetectionHistogram coincidence;
  DetectionHistogram all_singles;
  DetectionHistogram triggered_singles;
  DetectionHistogram untriggered_singles;
  std::uint64_t triggers = 0;
};

// One full plane campaign. Pairs are processed in kPairBatch shards, each
// with its own derived RNG stream, so the result is a pure function of
// (state, slit, plane, n, seed, label) regardless of scheduling.
Campaign run_campaign(const BiphotonState& state,
                      const std::optional<SlitAperture>& slit,
                      const PropagationSpec& plane, std::uint64_t n,
                      std::uint64_t seed, std::optional<double> blur_sd,
                      double position_bin, double wavevector_bin,
                      std::string_view label, bool partition,
                      const HistSpec* singles_override = nullptr) {
  state.validate();
  plane.validate();
  if (slit) slit->validate();
  if (n == 0) throw InvalidParameterError("n_pairs must be > 0");
  if (blur_sd && !(*blur_sd >= 0))
    throw InvalidParameterError("blur_sd must be >= 0");

  const PlaneLaw law = propagated_conditional_law(state, plane);
  const double bin = law.k_units ? wavevector_bin : position_bin;
  const double sq_eff = state.sigma_q_eff();
  const double sd_source =
      0.5 * std::sqrt(state.sigma_p * state.sigma_p + sq_eff * sq_eff);

  const bool blur_active = blur_sd && *blur_sd > 0 && !law.k_units;
  const double blur = blur_active ? *blur_sd : 0.0;

  // Histogram ranges are fixed up front from the closed-form widths so the
  // binning never depends on the sampled data.
  const double singles_sd = std::hypot(law.mean_scale * sd_source, law.sd);
  HistSpec singles_spec = singles_override
                              ? *singles_override
                              : HistSpec::centered(0.0, singles_sd, bin, law.k_units);
  HistSpec coin_spec = singles_spec;
  if (slit) {
    const double mixture_sd = std::hypot(
        law.mean_scale * sd_of_uniform_slit(slit->width), std::hypot(law.sd, blur));
    coin_spec =
        HistSpec::centered(law.mean_scale * slit->center, mixture_sd, bin, law.k_units);
  }

  Campaign c;
  c.coincidence = make_histogram(coin_spec, HistKind::coincidence, n);
  c.all_singles = make_histogram(singles_spec, HistKind::all_singles, n);
  if (partition) {
    c.triggered_singles = make_histogram(singles_spec, HistKind::triggered_singles, n);
    c.untriggered_singles = make_histogram(singles_spec, HistKind::all_singles, n);
  }

  const std::uint64_t batches = (n + kPairBatch - 1) / kPairBatch;
  for (std::uint64_t b = 0; b < batches; ++b) {
    std::mt19937_64 engine(derive_seed(seed, label, b));
    std::normal_distribution<double> normal;
    const std::uint64_t count = std::min(kPairBatch, n - b * kPairBatch);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double s = state.sigma_p * normal(engine);
      const double d = sq_eff * normal(engine);
      const double x_a = 0.5 * (s + d);

      const double detection = law.mean_scale * x_a + law.sd * normal(engine);
      c.all_singles.record(detection);

      const bool triggered =
          slit && std::abs(x_a - slit->center) <= 0.5 * slit->width;
      if (partition)
        (triggered ? c.triggered_singles : c.untriggered_singles).record(detection);
      if (triggered) {
        ++c.triggers;
        double coincidence = law.mean_scale * x_a + law.sd * normal(engine);
        if (blur_active) coincidence += blur * normal(engine);
        c.coincidence.record(coincidence);
      }
    }
  }
  return c;
}

}  // namespace

std::vector<double> DetectionHistogram::bin_edges() const {
  std::vector<double> edges(counts.size() + 1);
  for (std::size_t i = 0; i <= counts.size(); ++i)
    edges[i] = lo + bin_width * static_cast<double>(i);
  return edges;
}

std::uint64_t DetectionHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

bool DetectionHistogram::record(double x) {
  const double u = (x - lo) / bin_width;
  if (u < 0) return false;
  const auto idx = static_cast<std::size_t>(u);
  if (idx >= counts.size()) return false;
  ++counts[idx];
  return true;
}

void ExperimentConfig::validate() const {
  state.validate();
  if (slit) slit->validate();
  plane.validate();
  if (n_pairs == 0) throw InvalidParameterError("n_pairs must be > 0");
  if (blur_sd && !(*blur_sd >= 0))
    throw InvalidParameterError("blur_sd must be >= 0");
  if (position_bin && !(*position_bin > 0))
    throw InvalidParameterError("position bin width must be > 0");
  if (wavevector_bin && !(*wavevector_bin > 0))
    throw InvalidParameterError("wavevector bin width must be > 0");
}

PlaneLaw propagated_conditional_law(const BiphotonState& state,
                                    const PropagationSpec& plane) {
  state.validate();
  plane.validate();
  const double sigma_c = conditional_position_pdf(state, 0.0).sd;
  PlaneLaw law;
  if (plane.mode == PropagationSpec::Mode::lens_fourier) {
    law.mean_scale = 0.0;  // a transverse shift is only a phase ramp here
    law.sd = 1.0 / (2.0 * sigma_c);
    law.k_units = true;
    return law;
  }
  const double sp2 = state.sigma_p * state.sigma_p;
  const double sq = state.sigma_q_eff();
  const double sq2 = sq * sq;
  law.mean_scale = (sp2 - sq2) / (sp2 + sq2);
  law.sd = beam_width(sigma_c, rayleigh_range(sigma_c, state.wavelength), plane.z);
  law.k_units = false;
  return law;
}

std::vector<PairSample> sample_pairs(const BiphotonState& state, std::uint64_t n,
                                     std::uint64_t seed) {
  state.validate();
  if (n == 0) throw InvalidParameterError("pair count must be > 0");
  const double sq_eff = state.sigma_q_eff();
  std::vector<PairSample> out(n);
  const std::uint64_t batches = (n + kPairBatch - 1) / kPairBatch;
  for (std::uint64_t b = 0; b < batches; ++b) {
    std::mt19937_64 engine(derive_seed(seed, "pairs", b));
    std::normal_distribution<double> normal;
    const std::uint64_t count = std::min(kPairBatch, n - b * kPairBatch);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double s = state.sigma_p * normal(engine);
      const double d = sq_eff * normal(engine);
      out[b * kPairBatch + i] = {0.5 * (s + d), 0.5 * (s - d)};
    }
  }
  return out;
}

RunPlaneResult run_plane(const ExperimentConfig& config) {
  config.validate();
  Campaign c = run_campaign(config.state, config.slit, config.plane,
                            config.n_pairs, config.seed, config.blur_sd,
                            config.position_bin.value_or(kDefaultPositionBin),
                            config.wavevector_bin.value_or(kDefaultWavevectorBin),
                            "plane", /*partition=*/false);
  RunPlaneResult result;
  result.coincidence = std::move(c.coincidence);
  result.all_singles = std::move(c.all_singles);
  result.triggers = c.triggers;
  result.empty_coincidence = (c.triggers == 0);
  return result;
}

std::vector<ScanPoint> scan_z(const ExperimentConfig& config,
                              const std::vector<double>& z_um) {
  config.validate();
  if (z_um.empty()) throw InvalidParameterError("z list must not be empty");
  for (double z : z_um)
    if (!(z >= 0)) throw InvalidParameterError("z values must be >= 0");

  std::vector<ScanPoint> points;
  points.reserve(z_um.size());
  for (std::size_t i = 0; i < z_um.size(); ++i) {
    const std::string label = "scan:z#" + std::to_string(i);
    Campaign c = run_campaign(config.state, config.slit,
                              PropagationSpec::free_space(z_um[i]), config.n_pairs,
                              config.seed, config.blur_sd,
                              config.position_bin.value_or(kDefaultPositionBin),
                              config.wavevector_bin.value_or(kDefaultWavevectorBin),
                              label, /*partition=*/false);
    const SdEstimate cond = estimate_sd_ci(c.coincidence);
    const SdEstimate singles = estimate_sd_ci(c.all_singles);
    points.push_back({z_um[i], cond.sd, cond.ci_halfwidth(), singles.sd,
                      singles.ci_halfwidth()});
  }
  return points;
}

std::vector<std::uint64_t> FrameImage::column_sums() const {
  std::vector<std::uint64_t> sums(nx, 0);
  for (std::size_t r = 0; r < ny; ++r)
    for (std::size_t c = 0; c < nx; ++c) sums[c] += at(r, c);
  return sums;
}

std::vector<std::uint64_t> FrameImage::row_sums() const {
  std::vector<std::uint64_t> sums(ny, 0);
  for (std::size_t r = 0; r < ny; ++r)
    for (std::size_t c = 0; c < nx; ++c) sums[r] += at(r, c);
  return sums;
}

std::uint64_t FrameImage::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

FrameImage synthesize_frame(const DetectionHistogram& hist_x,
                            const BiphotonState& state, const PixelGrid& grid,
                            std::uint64_t seed) {
  state.validate();
  if (grid.ny == 0 || !(grid.dy > 0))
    throw InvalidParameterError("pixel grid must have ny > 0 and dy > 0");

  // Separable product form: the y marginal depends only on whether the
  // histogram is conditioned.
  const double sd_y = (hist_x.kind == HistKind::all_singles)
                          ? singles_pdfs(state).position.sd
                          : conditional_position_pdf(state, 0.0).sd;

  // Per-row probabilities: Gaussian integrated over each pixel row,
  // renormalized over the grid.
  std::vector<double> cdf(grid.ny);
  {
    const auto cell = [&](std::size_t r) {
      const double a = (grid.y0 + grid.dy * static_cast<double>(r)) / sd_y;
      const double b = (grid.y0 + grid.dy * static_cast<double>(r + 1)) / sd_y;
      const auto phi = [](double u) {
        return 0.5 * (1.0 + std::erf(u / std::numbers::sqrt2));
      };
      return phi(b) - phi(a);
    };
    double acc = 0;
    for (std::size_t r = 0; r < grid.ny; ++r) {
      acc += cell(r);
      cdf[r] = acc;
    }
    if (!(acc > 0))
      throw InvalidParameterError("pixel grid does not cover the y marginal");
    for (auto& v : cdf) v /= acc;
  }

  FrameImage frame;
  frame.nx = hist_x.counts.size();
  frame.ny = grid.ny;
  frame.y0 = grid.y0;
  frame.dy = grid.dy;
  frame.counts.assign(frame.nx * frame.ny, 0);

  std::mt19937_64 engine(derive_seed(seed, "frame", 0));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t col = 0; col < frame.nx; ++col) {
    for (std::uint64_t c = 0; c < hist_x.counts[col]; ++c) {
      const double u = uniform(engine);
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      const auto row = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(grid.ny) - 1));
      ++frame.counts[row * frame.nx + col];
    }
  }
  return frame;
}

FluctuationComparison compare_fluctuation(const DetectionHistogram& a,
                                          const DetectionHistogram& b,
                                          double min_mean_count) {
  if (a.counts.size() != b.counts.size() || a.lo != b.lo ||
      a.bin_width != b.bin_width)
    throw InvalidParameterError("histograms must share identical binning");

  FluctuationComparison cmp;
  cmp.pass = true;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    const double c1 = static_cast<double>(a.counts[i]);
    const double c2 = static_cast<double>(b.counts[i]);
    const double cbar = 0.5 * (c1 + c2);
    if (cbar < min_mean_count) continue;
    FluctuationBin bin;
    bin.center = a.bin_center(i);
    bin.c1 = a.counts[i];
    bin.c2 = b.counts[i];
    bin.normalized_dev = std::abs(c1 - c2) / cbar;
    bin.bound = 4.0 / std::sqrt(cbar);
    cmp.max_ratio = std::max(cmp.max_ratio, bin.normalized_dev / bin.bound);
    if (bin.normalized_dev >= bin.bound) cmp.pass = false;
    cmp.bins.push_back(bin);
  }
  return cmp;
}

AuditReport no_signaling_audit(const BiphotonState& state,
                               const SlitAperture& slit,
                               const PropagationSpec& plane, std::uint64_t n,
                               std::uint64_t seed) {
  state.validate();
  slit.validate();
  plane.validate();

  // Coarse shared binning keeps every compared bin far above the Poisson
  // floor: 24 bins across +-3 singles SDs.
  const PlaneLaw law = propagated_conditional_law(state, plane);
  const double sq_eff = state.sigma_q_eff();
  const double sd_source =
      0.5 * std::sqrt(state.sigma_p * state.sigma_p + sq_eff * sq_eff);
  const double singles_sd = std::hypot(law.mean_scale * sd_source, law.sd);
  HistSpec spec;
  spec.nbins = 24;
  spec.bin = 6.0 * singles_sd / static_cast<double>(spec.nbins);
  spec.lo = -3.0 * singles_sd;
  spec.k_units = law.k_units;

  Campaign with_slit =
      run_campaign(state, slit, plane, n, seed, std::nullopt, kDefaultPositionBin,
                   kDefaultWavevectorBin, "audit:slit-present", /*partition=*/true,
                   &spec);
  Campaign without_slit =
      run_campaign(state, std::nullopt, plane, n, seed, std::nullopt,
                   kDefaultPositionBin, kDefaultWavevectorBin,
                   "audit:slit-absent", /*partition=*/false, &spec);

  AuditReport report;
  report.n_pairs = n;
  report.triggers = with_slit.triggers;
  report.singles = compare_fluctuation(with_slit.all_singles,
                                       without_slit.all_singles);

  report.partition_ok = true;
  for (std::size_t i = 0; i < with_slit.all_singles.counts.size(); ++i) {
    if (with_slit.triggered_singles.counts[i] +
            with_slit.untriggered_singles.counts[i] !=
        with_slit.all_singles.counts[i]) {
      report.partition_ok = false;
      break;
    }
  }
  report.pass = report.singles.pass && report.partition_ok;
  return report;
}

double expected_trigger_rate(const BiphotonState& state,
                             const SlitAperture& slit) {
  state.validate();
  slit.validate();
  const double sq_eff = state.sigma_q_eff();
  const double sd_a =
      0.5 * std::sqrt(state.sigma_p * state.sigma_p + sq_eff * sq_eff);
  const auto phi = [](double u) {
    return 0.5 * (1.0 + std::erf(u / std::numbers::sqrt2));
  };
  const double a = (slit.center - 0.5 * slit.width) / sd_a;
  const double b = (slit.center + 0.5 * slit.width) / sd_a;
  return phi(b) - phi(a);
}

}  // namespace ghostsim
