#pragma once

// Thin wrapper over FFTW3 complex transforms (internal header).

#include <complex>
#include <span>
#include <vector>

namespace subwalk::detail {

/// In-place unnormalized multidimensional DFT over a row-major array with
/// the given extents. sign = -1 is the forward transform, +1 the inverse.
void dft_inplace(std::vector<std::complex<double>>& data, std::span<const int> extents, int sign);

}  // namespace subwalk::detail
