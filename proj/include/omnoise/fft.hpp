#pragma once

#include <complex>
#include <vector>

namespace omnoise {

// In-place complex DFT, any length. sign = -1: forward (e^{-2pi i jk/n}),
// sign = +1: backward (e^{+2pi i jk/n}). Unnormalized, FFTW conventions.
void fft_inplace(std::vector<std::complex<double>>& x, int sign);

}  // namespace omnoise
