#pragma once

#include <complex>
#include <span>
#include <vector>

namespace wakegate {

// In-place radix-2 FFT. Size must be a power of two. The inverse transform
// includes the 1/N scaling.
void fft(std::vector<std::complex<double>>& data, bool inverse);

// Real-input FFT: zero-pads x to n (power of two) and returns the n/2 + 1
// non-redundant bins.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n);

// Inverse of rfft for a conjugate-symmetric spectrum; returns n real samples.
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n);

}  // namespace wakegate
