#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghostsim/biphoton.hpp"
#include "ghostsim/wave_optics.hpp"

namespace ghostsim::cli {

/// Configuration file or flag problem; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Values overridable from the command line.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> pairs;
  std::optional<std::string> format;
};

/// Fully validated run configuration. Lengths in um except where the key
/// name says otherwise (z lists and focal lengths in mm, matching the
/// conventional experiment axes).
struct RunConfig {
  CrystalSpec crystal;
  PumpSpec pump;
  std::optional<double> aperture_ra;

  std::optional<SlitAperture> slit;
  std::string plane_mode = "free-space";  // free-space | lens-fourier
  double plane_z_mm = 0.0;
  double focal_mm = 75.0;

  std::uint64_t pairs = 0;
  std::uint64_t seed = 0;
  std::optional<double> blur_sd_um;

  double position_bin_um = 0.5;
  double wavevector_bin_per_um = 5e-4;

  std::vector<double> scan_z_mm;

  std::size_t frame_rows = 128;
  std::optional<double> frame_halfspan_um;

  std::string format = "csv";

  /// Canonical "key=value" lines of the effective configuration, sorted by
  /// key; the digest is computed over these.
  std::vector<std::string> canonical_lines;

  BiphotonState state() const;
  double plane_z_um() const { return plane_z_mm * 1000.0; }
  double focal_um() const { return focal_mm * 1000.0; }
};

/// Parse and validate a config file, applying command-line overrides.
/// Unknown keys, duplicate keys, malformed numbers and domain violations all
/// throw ConfigError with a path-to-field message.
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides);

/// FNV-1a digest of the canonical config lines, as fixed-width hex.
std::string config_digest(const RunConfig& config);

}  // namespace ghostsim::cli
