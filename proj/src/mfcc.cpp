#include "wakegate/mfcc.hpp"

#include <cmath>

#include "wakegate/errors.hpp"
#include "wakegate/fft.hpp"
#include "wakegate/stft.hpp"

namespace wakegate {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MfccMatrix extract_mfcc(std::span<const double> x, int sample_rate, const MfccConfig& config) {
  if (config.n_coeffs < 1 || config.n_mels < config.n_coeffs)
    throw InvalidArgument("mfcc needs 1 <= n_coeffs <= n_mels");
  if (config.fmax_hz > sample_rate / 2.0) throw InvalidArgument("mfcc fmax above Nyquist");
  if (config.fmin_hz < 0.0 || config.fmin_hz >= config.fmax_hz)
    throw InvalidArgument("mfcc band must satisfy 0 <= fmin < fmax");

  const auto window = static_cast<std::size_t>(std::lround(config.window_s * sample_rate));
  const auto hop = static_cast<std::size_t>(std::lround(config.hop_s * sample_rate));
  if (window == 0 || hop == 0) throw InvalidArgument("mfcc window/hop too small for rate");
  if (x.size() < window) throw InvalidArgument("signal shorter than one mfcc window");

  const std::size_t nfft = next_power_of_two(window);
  const std::size_t bins = nfft / 2 + 1;
  const std::vector<double> win = hann_window(window);

  // triangular mel bank on the power spectrum
  const auto n_mels = static_cast<std::size_t>(config.n_mels);
  const double mel_lo = hz_to_mel(config.fmin_hz);
  const double mel_hi = hz_to_mel(config.fmax_hz);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t m = 0; m < edges.size(); ++m)
    edges[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(m) /
                                      static_cast<double>(n_mels + 1));
  std::vector<std::vector<double>> bank(n_mels, std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(nfft);
      if (f <= lo || f >= hi) continue;
      bank[m][k] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }

  const std::size_t n_frames = (x.size() - window) / hop + 1;
  MfccMatrix out(n_frames, std::vector<double>(static_cast<std::size_t>(config.n_coeffs), 0.0));

  std::vector<double> frame(window);
  std::vector<double> mel_log(n_mels);
  const double dct_scale = std::sqrt(2.0 / static_cast<double>(n_mels));
  const double dct_scale0 = std::sqrt(1.0 / static_cast<double>(n_mels));

  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t off = f * hop;
    for (std::size_t i = 0; i < window; ++i) frame[i] = x[off + i] * win[i];
    const auto spec = rfft(frame, nfft);

    for (std::size_t m = 0; m < n_mels; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k)
        if (bank[m][k] != 0.0) e += bank[m][k] * std::norm(spec[k]);
      mel_log[m] = std::log(std::max(e, config.log_floor));
    }

    for (int c = 0; c < config.n_coeffs; ++c) {
      double acc = 0.0;
      for (std::size_t m = 0; m < n_mels; ++m)
        acc += mel_log[m] *
               std::cos(M_PI * static_cast<double>(c) * (static_cast<double>(m) + 0.5) /
                        static_cast<double>(n_mels));
      out[f][static_cast<std::size_t>(c)] = (c == 0 ? dct_scale0 : dct_scale) * acc;
    }
  }
  return out;
}

MfccMatrix extract_mfcc(const AudioBuffer& mono, const MfccConfig& config) {
  if (mono.channel_count() != 1) throw InvalidArgument("mfcc expects a mono buffer");
  if (mono.sample_rate() != kCanonicalRate)
    throw InvalidArgument("mfcc input not at the canonical rate");
  return extract_mfcc(mono.channel(0), mono.sample_rate(), config);
}

}  // namespace wakegate
