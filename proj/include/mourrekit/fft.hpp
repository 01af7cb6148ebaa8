#pragma once

#include <complex>
#include <span>
#include <vector>

namespace mk::fft {

using cplx = std::complex<double>;

// In-place unnormalized DFT of row-major data, last axis fastest.
// sign = -1: X_k = sum_j x_j exp(-2 pi i j.k / R); sign = +1 is the conjugate kernel.
void transform(std::vector<cplx>& data, std::span<const int> dims, int sign);

}  // namespace mk::fft
