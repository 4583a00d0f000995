#pragma once

#include <array>
#include <span>
#include <vector>

#include "bornlab/grid.hpp"
#include "bornlab/numerics.hpp"

namespace bornlab::spectral {

/// In-place unnormalized N-d DFT (FFTW, row-major). sign = -1 forward, +1 inverse.
void fft(std::span<Complex> data, const std::vector<std::size_t>& shape, int sign);

/// Angular wavenumber of FFT bin j on the given axis.
double wavenumber(const Grid& grid, std::size_t axis, std::size_t j);

/// Derivative multi-index: order of differentiation per axis.
using Orders = std::array<int, kMaxDim>;

/// Applies the Fourier multiplier prod_a (i k_a)^{orders[a]} to the spectrum
/// `hat` (forward-transformed, unnormalized) and returns the inverse transform,
/// normalized. Odd orders zero the Nyquist bin.
std::vector<Complex> apply_multiplier(const Grid& grid, std::span<const Complex> hat, const Orders& orders);

/// Convenience: derivative of sampled data of the given multi-index.
std::vector<Complex> derivative(const Grid& grid, std::span<const Complex> values, const Orders& orders);
std::vector<double> derivative(const Grid& grid, std::span<const double> values, const Orders& orders);

void require_spectral(const Grid& grid, const char* what);

} // namespace bornlab::spectral
