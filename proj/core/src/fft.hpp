#pragma once

// Thin FFTW wrappers. Planning is serialized (the FFTW planner is not
// thread-safe); execution is not.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace czx::detail {

/// Row-major r2c transform; the last axis is halved to n/2 + 1 entries.
std::vector<std::complex<double>> forward_half(std::span<const double> values,
                                               std::span<const std::size_t> dims);
/// Inverse of forward_half without the 1/N normalization.
std::vector<double> inverse_half(std::vector<std::complex<double>> spectrum,
                                 std::span<const std::size_t> dims);
/// Full complex forward transform of real data.
std::vector<std::complex<double>> forward_full(std::span<const double> values,
                                               std::span<const std::size_t> dims);
/// Normalized circular convolution of two real arrays of the same shape.
std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b,
                                      std::span<const std::size_t> dims);

}  // namespace czx::detail
