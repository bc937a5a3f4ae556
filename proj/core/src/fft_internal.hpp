#pragma once
#include <complex>
#include <vector>

namespace ghostsim::detail {

/// In-place complex DFT of a power-of-two-sized vector. The inverse
/// transform includes the 1/N scale, so forward followed by inverse is the
/// identity up to roundoff.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace ghostsim::detail
