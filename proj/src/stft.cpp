#include "wakegate/stft.hpp"

#include <cmath>

#include "wakegate/errors.hpp"
#include "wakegate/fft.hpp"

namespace wakegate {

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

Spectrogram stft(std::span<const double> x, std::size_t window_size, std::size_t hop,
                 int sample_rate, StftOptions options) {
  if (!is_power_of_two(window_size)) throw InvalidArgument("stft window must be a power of two");
  if (hop == 0 || window_size % hop != 0) throw InvalidArgument("stft hop must divide the window");

  std::vector<double> padded;
  std::span<const double> sig = x;
  if (x.size() < window_size) {
    if (!options.zero_pad_short_input)
      throw InvalidArgument("signal shorter than one stft window");
    padded.assign(x.begin(), x.end());
    padded.resize(window_size, 0.0);
    sig = padded;
  }

  const std::vector<double> win = hann_window(window_size);
  const std::size_t n_frames = (sig.size() - window_size) / hop + 1;

  Spectrogram spec;
  spec.window_size = window_size;
  spec.hop = hop;
  spec.sample_rate = sample_rate;
  spec.frames.reserve(n_frames);

  std::vector<double> frame(window_size);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t off = f * hop;
    for (std::size_t i = 0; i < window_size; ++i) frame[i] = sig[off + i] * win[i];
    spec.frames.push_back(rfft(frame, window_size));
  }
  return spec;
}

Spectrogram stft(const AudioBuffer& mono, std::size_t window_size, std::size_t hop,
                 StftOptions options) {
  if (mono.channel_count() != 1) throw InvalidArgument("stft expects a mono buffer");
  return stft(mono.channel(0), window_size, hop, mono.sample_rate(), options);
}

AudioBuffer istft(const Spectrogram& spec) {
  if (spec.frames.empty()) throw InvalidArgument("istft on empty spectrogram");
  const std::size_t window = spec.window_size;
  const std::size_t hop = spec.hop;
  const std::size_t bins = spec.bins();
  for (const auto& fr : spec.frames)
    if (fr.size() != bins) throw InvalidArgument("istft frame size mismatch");

  const std::vector<double> win = hann_window(window);
  const std::size_t n = (spec.frames.size() - 1) * hop + window;
  std::vector<double> acc(n, 0.0);
  std::vector<double> norm(n, 0.0);

  for (std::size_t f = 0; f < spec.frames.size(); ++f) {
    const std::vector<double> t = irfft(spec.frames[f], window);
    const std::size_t off = f * hop;
    for (std::size_t i = 0; i < window; ++i) {
      acc[off + i] += t[i] * win[i];
      norm[off + i] += win[i] * win[i];
    }
  }

  for (std::size_t i = 0; i < n; ++i) acc[i] = norm[i] > 1e-12 ? acc[i] / norm[i] : 0.0;
  return AudioBuffer::from_mono(std::move(acc), spec.sample_rate);
}

}  // namespace wakegate
