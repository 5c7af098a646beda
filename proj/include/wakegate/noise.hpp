#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "wakegate/stft.hpp"

namespace wakegate {

struct NoiseEstimate {
  std::vector<double> floor_mag;  // per STFT bin
  std::uint64_t update_count = 0;
};

// Minimum-statistics noise floor tracker. Smooths per-bin power and keeps a
// sliding-window minimum per bin; speech peaks ride above the minimum and do
// not pull the floor up.
class NoiseTracker {
 public:
  NoiseTracker(std::size_t bins, std::size_t window_frames, std::size_t initial_frames);

  void update(std::span<const std::complex<double>> frame);

  // Current per-bin magnitude floor (bias-compensated minimum).
  const std::vector<double>& floor_mag() const { return floor_; }
  std::uint64_t update_count() const { return count_; }
  NoiseEstimate estimate() const { return {floor_, count_}; }

 private:
  std::size_t window_frames_;
  std::size_t initial_frames_;
  std::uint64_t count_ = 0;
  std::vector<double> smoothed_power_;
  std::vector<std::deque<std::pair<std::uint64_t, double>>> min_window_;  // monotone deques
  std::vector<double> floor_;
};

// Batch form: floor from the whole spectrogram, seeded by the mean of the
// first `initial_frames` frames (assumed speech-free).
NoiseEstimate estimate_noise(const Spectrogram& spec, std::size_t initial_frames = 10,
                             double window_s = 1.5);

// Magnitude spectral subtraction with over-subtraction alpha and spectral
// floor beta: |Y| <- max(|Y| - alpha * floor, beta * |Y|), phase untouched.
// Never amplifies a bin.
Spectrogram suppress_noise(const Spectrogram& spec, const NoiseEstimate& noise, double alpha = 2.0,
                           double beta = 0.01);

}  // namespace wakegate
