#include "fft_internal.hpp"

#include <fftw3.h>

#include <mutex>

namespace ghostsim::detail {

namespace {
// The FFTW planner is not thread-safe; plan creation and destruction are
// serialized. Execution itself is re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
  const int n = static_cast<int>(data.size());
  if (n <= 1) return;
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, raw, raw, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  if (inverse) {
    const double scale = 1.0 / n;
    for (auto& v : data) v *= scale;
  }
}

}  // namespace ghostsim::detail
