#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wakegate/audio.hpp"
#include "wakegate/scene.hpp"
#include "wakegate/stft.hpp"

namespace wakegate {

struct DoaResult {
  bool has_source = false;  // false for silent input
  double azimuth_deg = 0.0;
  double confidence = 0.0;  // grid peak over grid mean
};

// Azimuth of the dominant source: phase-transform-weighted cross-spectra
// over all mic pairs, steered across an azimuth grid with the exact
// fractional inter-mic delays. Sub-sample accurate, which matters for
// centimeter-scale arrays where inter-mic lags are fractions of a sample.
DoaResult estimate_doa(const AudioBuffer& block, const ArrayGeometry& geometry,
                       double grid_resolution_deg = 5.0);

// Same estimator over pre-averaged per-pair cross spectra (pairs in
// (i, j), i < j, row-major order). Used by the streaming pipeline.
DoaResult steer_cross_spectra(const std::vector<std::vector<std::complex<double>>>& pair_cross,
                              const ArrayGeometry& geometry, std::size_t fft_size,
                              int sample_rate, double grid_resolution_deg);

// Integer-lag GCC-PHAT delay between two signals, positive when y lags x.
// Matches the plain cross-correlation argmax on clean delayed copies.
int gcc_phat_lag(std::span<const double> x, std::span<const double> y, int max_lag);

}  // namespace wakegate
