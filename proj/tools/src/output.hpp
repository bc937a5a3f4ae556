#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "ghostsim/analysis.hpp"
#include "ghostsim/montecarlo.hpp"
#include "run_config.hpp"

namespace ghostsim::cli {

/// Deterministic decimal rendering used for every floating-point value we
/// emit; byte-identical reruns rely on it.
std::string format_double(double v);

struct ManifestEntry {
  std::string name;
  std::string kind;  // histogram | widths | report | frame | audit
};

/// Collects emitted files and writes manifest.json last.
class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, std::string digest, std::uint64_t seed);

  void write_histogram_csv(const std::string& name, const DetectionHistogram& hist);
  void write_widths_csv(const std::string& name, const std::vector<ScanPoint>& points);
  void write_frame_pgm(const std::string& name, const FrameImage& frame);
  /// key/value report lines, written verbatim in the given order.
  void write_report(const std::string& name,
                    const std::vector<std::pair<std::string, std::string>>& lines,
                    const std::string& kind = "report");
  void write_audit_csv(const std::string& name, const FluctuationComparison& cmp);

  void write_manifest();
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string digest_;
  std::uint64_t seed_;
  std::vector<ManifestEntry> entries_;
};

/// Parse a histogram CSV back into (bin_center, count) pairs.
std::vector<std::pair<double, std::uint64_t>> read_histogram_csv(
    const std::filesystem::path& path);

}  // namespace ghostsim::cli
