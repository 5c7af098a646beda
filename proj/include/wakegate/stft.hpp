#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wakegate/audio.hpp"

namespace wakegate {

// Short-time spectrum: frames x (window_size/2 + 1) complex bins.
struct Spectrogram {
  std::vector<std::vector<std::complex<double>>> frames;
  std::size_t window_size = 512;
  std::size_t hop = 128;
  int sample_rate = kCanonicalRate;

  std::size_t bins() const { return window_size / 2 + 1; }
  std::size_t frame_count() const { return frames.size(); }
  double bin_hz(std::size_t k) const {
    return static_cast<double>(k) * sample_rate / static_cast<double>(window_size);
  }
};

struct StftOptions {
  // When set, inputs shorter than one window are zero-padded to a single
  // frame instead of rejected.
  bool zero_pad_short_input = false;
};

// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

// Hann-windowed STFT. window_size must be a power of two and hop must divide
// it (keeps the analysis/synthesis pair overlap-add exact). Frames cover
// [0, window), [hop, hop+window), ...; trailing samples that do not fill a
// whole window are dropped (no zero padding at the tail).
Spectrogram stft(std::span<const double> x, std::size_t window_size, std::size_t hop,
                 int sample_rate, StftOptions options = {});
Spectrogram stft(const AudioBuffer& mono, std::size_t window_size, std::size_t hop,
                 StftOptions options = {});

// Weighted overlap-add inverse. Output length is (frames-1)*hop + window.
// Interior samples reconstruct exactly; the first and last window are
// attenuated by the partial window sum and carry no accuracy guarantee.
AudioBuffer istft(const Spectrogram& spec);

}  // namespace wakegate
