#pragma once

#include <complex>
#include <span>

namespace stochafd::detail {

// Unnormalized DFT. sign = -1: X_k = sum_j x_j e^{-2 pi i jk/n};
// sign = +1: the conjugate-exponent (inverse) direction.
void dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign);

}  // namespace stochafd::detail
