#include "output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "version.hpp"

namespace ghostsim::cli {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // fixed newlines on any host
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

OutputDir::OutputDir(std::filesystem::path dir, std::string digest,
                     std::uint64_t seed)
    : dir_(std::move(dir)), digest_(std::move(digest)), seed_(seed) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write_histogram_csv(const std::string& name,
                                    const DetectionHistogram& hist) {
  auto out = open_for_write(dir_ / name);
  out << "bin_center,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    out << format_double(hist.bin_center(i)) << ',' << hist.counts[i] << '\n';
  entries_.push_back({name, "histogram"});
}

void OutputDir::write_widths_csv(const std::string& name,
                                 const std::vector<ScanPoint>& points) {
  auto out = open_for_write(dir_ / name);
  out << "z_mm,cond_sd_um,cond_ci_um,singles_sd_um,singles_ci_um\n";
  for (const auto& p : points) {
    out << format_double(p.z / 1000.0) << ',' << format_double(p.cond_sd) << ','
        << format_double(p.cond_ci) << ',' << format_double(p.singles_sd) << ','
        << format_double(p.singles_ci) << '\n';
  }
  entries_.push_back({name, "widths"});
}

void OutputDir::write_frame_pgm(const std::string& name, const FrameImage& frame) {
  auto out = open_for_write(dir_ / name);
  std::uint64_t peak = 1;
  for (auto c : frame.counts) peak = std::max(peak, c);
  peak = std::min<std::uint64_t>(peak, 65535);
  out << "P2\n" << frame.nx << ' ' << frame.ny << '\n' << peak << '\n';
  for (std::size_t r = 0; r < frame.ny; ++r) {
    for (std::size_t c = 0; c < frame.nx; ++c) {
      if (c) out << ' ';
      out << std::min<std::uint64_t>(frame.at(r, c), peak);
    }
    out << '\n';
  }
  entries_.push_back({name, "frame"});
}

void OutputDir::write_report(
    const std::string& name,
    const std::vector<std::pair<std::string, std::string>>& lines,
    const std::string& kind) {
  auto out = open_for_write(dir_ / name);
  for (const auto& [key, value] : lines) out << key << " = " << value << '\n';
  entries_.push_back({name, kind});
}

void OutputDir::write_audit_csv(const std::string& name,
                                const FluctuationComparison& cmp) {
  auto out = open_for_write(dir_ / name);
  out << "bin_center,slit_present,slit_absent,normalized_dev,bound\n";
  for (const auto& bin : cmp.bins) {
    out << format_double(bin.center) << ',' << bin.c1 << ',' << bin.c2 << ','
        << format_double(bin.normalized_dev) << ',' << format_double(bin.bound)
        << '\n';
  }
  entries_.push_back({name, "audit"});
}

void OutputDir::write_manifest() {
  nlohmann::json manifest;
  manifest["config_digest"] = digest_;
  manifest["seed"] = seed_;
  manifest["tool_version"] = kToolVersion;
  auto files = nlohmann::json::array();
  for (const auto& e : entries_) files.push_back({{"kind", e.kind}, {"name", e.name}});
  manifest["files"] = files;
  auto out = open_for_write(dir_ / "manifest.json");
  out << manifest.dump(2) << '\n';
}

std::vector<std::pair<double, std::uint64_t>> read_histogram_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::pair<double, std::uint64_t>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, comma)),
                      std::stoull(line.substr(comma + 1)));
  }
  return rows;
}

}  // namespace ghostsim::cli
