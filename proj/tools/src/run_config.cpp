#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "ghostsim/errors.hpp"
#include "ghostsim/rng.hpp"

namespace ghostsim::cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "crystal.length_um",     "crystal.pump_wavelength_um",
    "crystal.phase_mismatch", "crystal.refractive_index",
    "pump.sigma_p_um",       "state.aperture_ra_um",
    "slit.width_um",         "slit.center_um",
    "plane.mode",            "plane.z_mm",
    "plane.focal_mm",        "run.pairs",
    "run.seed",              "run.blur_sd_um",
    "hist.position_bin_um",  "hist.wavevector_bin_per_um",
    "scan.z_list_mm",        "frame.rows",
    "frame.halfspan_um",     "output.format",
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + value + "' as a number");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError(key + ": cannot parse '" + value + "' as an unsigned integer");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key + ": empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError(key + ": list must not be empty");
  return out;
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0)) throw ConfigError(key + ": must be > 0, got " + std::to_string(v));
}

void require_non_negative(const std::string& key, double v) {
  if (!(v >= 0)) throw ConfigError(key + ": must be >= 0, got " + std::to_string(v));
}

}  // namespace

BiphotonState RunConfig::state() const {
  return build_state(crystal, pump, aperture_ra);
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());

  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key))
      throw ConfigError(key + ": unknown configuration key");
    if (kv.count(key)) throw ConfigError(key + ": duplicate key");
    if (value.empty()) throw ConfigError(key + ": empty value");
    kv[key] = value;
  }

  if (overrides.seed) kv["run.seed"] = std::to_string(*overrides.seed);
  if (overrides.pairs) kv["run.pairs"] = std::to_string(*overrides.pairs);
  if (overrides.format) kv["output.format"] = *overrides.format;

  const auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return {};
    return it->second;
  };
  const auto require = [&](const char* key) -> std::string {
    const auto v = get(key);
    if (!v) throw ConfigError(std::string(key) + ": required key is missing");
    return *v;
  };

  RunConfig config;
  config.crystal.length_um = parse_double("crystal.length_um", require("crystal.length_um"));
  require_positive("crystal.length_um", config.crystal.length_um);
  config.crystal.pump_wavelength_um =
      parse_double("crystal.pump_wavelength_um", require("crystal.pump_wavelength_um"));
  require_positive("crystal.pump_wavelength_um", config.crystal.pump_wavelength_um);
  if (const auto v = get("crystal.phase_mismatch"))
    config.crystal.phase_mismatch = parse_double("crystal.phase_mismatch", *v);
  if (const auto v = get("crystal.refractive_index")) {
    config.crystal.refractive_index = parse_double("crystal.refractive_index", *v);
    if (!(*config.crystal.refractive_index >= 1.0))
      throw ConfigError("crystal.refractive_index: must be >= 1");
  }

  config.pump.sigma_p_um = parse_double("pump.sigma_p_um", require("pump.sigma_p_um"));
  require_positive("pump.sigma_p_um", config.pump.sigma_p_um);

  if (const auto v = get("state.aperture_ra_um")) {
    config.aperture_ra = parse_double("state.aperture_ra_um", *v);
    require_non_negative("state.aperture_ra_um", *config.aperture_ra);
  }

  if (const auto v = get("slit.width_um")) {
    SlitAperture slit;
    slit.width = parse_double("slit.width_um", *v);
    require_positive("slit.width_um", slit.width);
    if (const auto c = get("slit.center_um"))
      slit.center = parse_double("slit.center_um", *c);
    config.slit = slit;
  } else if (get("slit.center_um")) {
    throw ConfigError("slit.center_um: slit.width_um is missing");
  }

  if (const auto v = get("plane.mode")) {
    if (*v != "free-space" && *v != "lens-fourier")
      throw ConfigError("plane.mode: must be 'free-space' or 'lens-fourier'");
    config.plane_mode = *v;
  }
  if (const auto v = get("plane.z_mm")) {
    config.plane_z_mm = parse_double("plane.z_mm", *v);
    require_non_negative("plane.z_mm", config.plane_z_mm);
  }
  if (const auto v = get("plane.focal_mm")) {
    config.focal_mm = parse_double("plane.focal_mm", *v);
    require_positive("plane.focal_mm", config.focal_mm);
  }

  config.pairs = parse_u64("run.pairs", require("run.pairs"));
  if (config.pairs == 0) throw ConfigError("run.pairs: must be >= 1");
  config.seed = parse_u64("run.seed", require("run.seed"));
  if (const auto v = get("run.blur_sd_um")) {
    config.blur_sd_um = parse_double("run.blur_sd_um", *v);
    require_non_negative("run.blur_sd_um", *config.blur_sd_um);
  }

  if (const auto v = get("hist.position_bin_um")) {
    config.position_bin_um = parse_double("hist.position_bin_um", *v);
    require_positive("hist.position_bin_um", config.position_bin_um);
  }
  if (const auto v = get("hist.wavevector_bin_per_um")) {
    config.wavevector_bin_per_um = parse_double("hist.wavevector_bin_per_um", *v);
    require_positive("hist.wavevector_bin_per_um", config.wavevector_bin_per_um);
  }

  if (const auto v = get("scan.z_list_mm")) {
    config.scan_z_mm = parse_list("scan.z_list_mm", *v);
    for (double z : config.scan_z_mm) require_non_negative("scan.z_list_mm", z);
  }

  if (const auto v = get("frame.rows")) {
    config.frame_rows = parse_u64("frame.rows", *v);
    if (config.frame_rows < 8) throw ConfigError("frame.rows: must be >= 8");
  }
  if (const auto v = get("frame.halfspan_um")) {
    config.frame_halfspan_um = parse_double("frame.halfspan_um", *v);
    require_positive("frame.halfspan_um", *config.frame_halfspan_um);
  }

  if (const auto v = get("output.format")) {
    if (*v != "csv") throw ConfigError("output.format: only 'csv' is supported");
    config.format = *v;
  }

  // Validate the physics-level invariants through the library types.
  try {
    config.state().validate();
    if (config.slit) config.slit->validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  config.canonical_lines.reserve(kv.size());
  for (const auto& [key, value] : kv)  // std::map iterates in key order
    config.canonical_lines.push_back(key + "=" + value);
  return config;
}

std::string config_digest(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& line : config.canonical_lines) {
    for (unsigned char c : line) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= '\n';
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ghostsim::cli
