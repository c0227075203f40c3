#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace phasepath::detail {

enum class FftDirection { forward, backward };

/// Unnormalized in-place DFT: forward uses exp(-2 pi i jk/n), backward
/// exp(+2 pi i jk/n). Plans are cached per (n, direction); execution is
/// thread-safe.
void fft_inplace(std::span<std::complex<double>> data, FftDirection direction);

}  // namespace phasepath::detail
