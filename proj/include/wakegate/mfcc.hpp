#pragma once

#include <vector>

#include "wakegate/audio.hpp"

namespace wakegate {

struct MfccConfig {
  int n_coeffs = 13;
  double window_s = 0.025;
  double hop_s = 0.010;
  int n_mels = 26;
  double fmin_hz = 50.0;
  double fmax_hz = 7800.0;  // must stay at or below Nyquist
  double log_floor = 1e-10;
};

using MfccMatrix = std::vector<std::vector<double>>;  // frames x coefficients

// Hann frame -> power spectrum -> triangular mel bank (HTK mel scale) ->
// natural log -> orthonormal DCT-II, keeping the first n_coeffs.
MfccMatrix extract_mfcc(const AudioBuffer& mono, const MfccConfig& config = {});
MfccMatrix extract_mfcc(std::span<const double> x, int sample_rate, const MfccConfig& config = {});

double hz_to_mel(double hz);
double mel_to_hz(double mel);

}  // namespace wakegate
