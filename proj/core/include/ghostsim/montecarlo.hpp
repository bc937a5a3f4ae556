#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghostsim/biphoton.hpp"
#include "ghostsim/wave_optics.hpp"

namespace ghostsim {

/// Transverse positions of one photon pair at the source plane.
struct PairSample {
  double x_a = 0;
  double x_b = 0;
};

enum class HistKind { coincidence, triggered_singles, all_singles };

/// Binned detection positions (or wavevectors) with uniform bins.
struct DetectionHistogram {
  double lo = 0;         ///< left edge of bin 0
  double bin_width = 1;  ///< uniform width
  std::vector<std::uint64_t> counts;
  std::uint64_t n_trials = 0;  ///< pairs simulated for this histogram
  HistKind kind = HistKind::all_singles;
  bool k_units = false;  ///< bins in 1/um instead of um

  double bin_center(std::size_t i) const {
    return lo + bin_width * (static_cast<double>(i) + 0.5);
  }
  std::vector<double> bin_edges() const;
  std::uint64_t total() const;
  /// Record a detection; out-of-range values are dropped (counts stay <= trials).
  bool record(double x);
};

/// One complete plane measurement: source state, slit in arm A (absent means
/// no conditioning is possible), detection plane in arm B.
struct ExperimentConfig {
  BiphotonState state;
  std::optional<SlitAperture> slit;
  PropagationSpec plane;
  std::uint64_t n_pairs = 0;
  std::uint64_t seed = 0;
  /// Near-field imaging imperfection: extra Gaussian blur applied to
  /// coincidence detection positions in free-space planes.
  std::optional<double> blur_sd;
  std::optional<double> position_bin;    ///< um, default 0.5
  std::optional<double> wavevector_bin;  ///< 1/um, default 5e-4

  void validate() const;
};

/// Law of the propagated conditional state of photon B at a plane: given a
/// trigger position x_a the detection coordinate is Gaussian with mean
/// mean_scale * x_a and the stated sd. In the lens plane the coordinate is a
/// wavevector, the mean is zero and the sd is x_a-independent.
struct PlaneLaw {
  double mean_scale = 0;
  double sd = 0;
  bool k_units = false;
};
PlaneLaw propagated_conditional_law(const BiphotonState& state,
                                    const PropagationSpec& plane);

/// Draw photon-pair positions: sum ~ N(0, sigma_p), difference
/// ~ N(0, sigma_q_eff), independent. Deterministic for fixed (seed, batch
/// layout); the stream is split into kPairBatch-sized shards, each seeded
/// through derive_seed, so any parallel split reproduces the same samples.
std::vector<PairSample> sample_pairs(const BiphotonState& state,
                                     std::uint64_t n, std::uint64_t seed);

struct RunPlaneResult {
  DetectionHistogram coincidence;
  DetectionHistogram all_singles;
  std::uint64_t triggers = 0;
  /// Set when no pair triggered (slit absent or far outside the beam).
  bool empty_coincidence = false;
};

/// Simulate one plane. Every pair contributes one unconditioned detection of
/// photon B; pairs whose photon A falls inside the slit additionally
/// contribute one coincidence detection drawn from the propagated conditional
/// state given that exact x_a.
RunPlaneResult run_plane(const ExperimentConfig& config);

struct ScanPoint {
  double z = 0;           ///< um
  double cond_sd = 0;     ///< coincidence width, um
  double cond_ci = 0;     ///< 95% CI halfwidth
  double singles_sd = 0;  ///< singles width, um
  double singles_ci = 0;
};

/// run_plane at each z with independently derived seeds; widths and CIs from
/// the moment estimator.
std::vector<ScanPoint> scan_z(const ExperimentConfig& config,
                              const std::vector<double>& z_um);

/// 2-D photon-count image synthesized from an x histogram and the separable
/// y marginal of the state.
struct FrameImage {
  std::size_t nx = 0, ny = 0;
  double y0 = 0, dy = 0;
  std::vector<std::uint64_t> counts;  ///< row-major, ny rows of nx columns

  std::uint64_t at(std::size_t row, std::size_t col) const {
    return counts[row * nx + col];
  }
  std::vector<std::uint64_t> column_sums() const;
  std::vector<std::uint64_t> row_sums() const;
  std::uint64_t total() const;
};

struct PixelGrid {
  double y0 = 0;
  double dy = 0;
  std::size_t ny = 0;
};

/// Product-form frame: the x marginal is the histogram itself (column sums
/// reproduce it exactly), the y marginal is the state's conditioned or
/// unconditioned 1-D law depending on the histogram kind. Counts are placed
/// by a seeded multinomial draw.
FrameImage synthesize_frame(const DetectionHistogram& hist_x,
                            const BiphotonState& state, const PixelGrid& grid,
                            std::uint64_t seed);

/// Per-bin comparison of two histograms against the Poisson fluctuation
/// bound |c1 - c2| / cbar < 4 / sqrt(cbar), cbar the per-bin mean count.
struct FluctuationBin {
  double center = 0;
  std::uint64_t c1 = 0, c2 = 0;
  double normalized_dev = 0;  ///< |c1-c2| / cbar
  double bound = 0;           ///< 4 / sqrt(cbar)
};
struct FluctuationComparison {
  std::vector<FluctuationBin> bins;  ///< bins with cbar >= min_mean_count
  double max_ratio = 0;              ///< max of normalized_dev / bound
  bool pass = false;
};
FluctuationComparison compare_fluctuation(const DetectionHistogram& a,
                                          const DetectionHistogram& b,
                                          double min_mean_count = 25);

struct AuditReport {
  FluctuationComparison singles;  ///< slit-present vs slit-absent singles
  bool partition_ok = false;  ///< triggered + untriggered == all singles
  std::uint64_t n_pairs = 0;
  std::uint64_t triggers = 0;
  bool pass = false;
};

/// No-signaling audit: runs the experiment with and without the slit (same
/// base seed, independent sub-streams) and checks that the all-singles
/// histograms at the plane agree within Poisson fluctuations. Also verifies
/// the exact partition of singles into triggered and untriggered parts.
AuditReport no_signaling_audit(const BiphotonState& state,
                               const SlitAperture& slit,
                               const PropagationSpec& plane, std::uint64_t n,
                               std::uint64_t seed);

/// Closed-form fraction of pairs expected to trigger the bucket detector.
double expected_trigger_rate(const BiphotonState& state,
                             const SlitAperture& slit);

}  // namespace ghostsim
