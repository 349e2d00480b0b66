#pragma once

#include <complex>
#include <vector>

namespace pphi2::fft {

/// In-place complex DFT along one axis of a row-major (rows x cols) array.
/// sign = -1 forward (e^{-i...}), +1 backward.  No normalization is applied;
/// callers own the lattice measure factors.  Thread safe (plan cache guarded).
void transform_rows(std::complex<double>* data, int rows, int cols, int sign);
void transform_cols(std::complex<double>* data, int rows, int cols, int sign);

/// 1d convenience on a contiguous vector.
void transform(std::complex<double>* data, int n, int sign);

}  // namespace pphi2::fft
