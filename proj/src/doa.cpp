#include "wakegate/doa.hpp"

#include <cmath>

#include "wakegate/errors.hpp"
#include "wakegate/fft.hpp"

namespace wakegate {

namespace {

constexpr double kSilenceRms = 3.16e-5;  // -90 dBFS

std::vector<std::pair<std::size_t, std::size_t>> mic_pairs(std::size_t m) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  return pairs;
}

}  // namespace

DoaResult steer_cross_spectra(const std::vector<std::vector<std::complex<double>>>& pair_cross,
                              const ArrayGeometry& geometry, std::size_t fft_size,
                              int sample_rate, double grid_resolution_deg) {
  if (grid_resolution_deg <= 0.0) throw InvalidArgument("grid resolution must be positive");
  const auto pairs = mic_pairs(geometry.mic_count());
  if (pair_cross.size() != pairs.size()) throw InvalidArgument("pair cross-spectra count mismatch");

  // phase transform: keep phase, discard magnitude
  std::vector<std::vector<std::complex<double>>> phat(pair_cross.size());
  for (std::size_t p = 0; p < pair_cross.size(); ++p) {
    phat[p].resize(pair_cross[p].size());
    for (std::size_t k = 0; k < pair_cross[p].size(); ++k) {
      const double mag = std::abs(pair_cross[p][k]);
      phat[p][k] = mag > 1e-14 ? pair_cross[p][k] / mag : std::complex<double>(0.0, 0.0);
    }
  }

  const auto grid_n = static_cast<std::size_t>(std::lround(360.0 / grid_resolution_deg));
  double best = -1e300, best_az = 0.0, sum_pos = 0.0;
  for (std::size_t g = 0; g < grid_n; ++g) {
    const double az = static_cast<double>(g) * grid_resolution_deg;
    const auto delays = delays_for_azimuth(geometry, az);
    double r = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double tau = delays[pairs[p].first] - delays[pairs[p].second];
      const std::size_t bins = phat[p].size();
      // skip DC; evaluate the whitened cross-correlation at continuous lag tau
      for (std::size_t k = 1; k < bins; ++k) {
        const double f = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
        const double ang = 2.0 * M_PI * f * tau;
        r += phat[p][k].real() * std::cos(ang) - phat[p][k].imag() * std::sin(ang);
      }
    }
    sum_pos += std::max(r, 0.0);
    if (r > best) {
      best = r;
      best_az = az;
    }
  }

  DoaResult out;
  out.has_source = true;
  out.azimuth_deg = best_az;
  const double mean_pos = sum_pos / static_cast<double>(grid_n);
  out.confidence = best / std::max(mean_pos, 1e-12);
  return out;
}

DoaResult estimate_doa(const AudioBuffer& block, const ArrayGeometry& geometry,
                       double grid_resolution_deg) {
  geometry.validate();
  if (block.channel_count() < 2) throw InvalidArgument("doa needs at least 2 channels");
  const double max_delay_samples =
      2.0 * geometry.max_radius() / geometry.speed_of_sound * block.sample_rate();
  if (static_cast<double>(block.frame_count()) < 2.0 * std::max(max_delay_samples, 1.0))
    throw InvalidArgument("block too short for doa");

  double energy = 0.0;
  for (std::size_t c = 0; c < block.channel_count(); ++c)
    for (double v : block.channel(c)) energy += v * v;
  const double rms_all =
      std::sqrt(energy / static_cast<double>(block.channel_count() * block.frame_count()));
  if (rms_all < kSilenceRms) return {};  // silent: no source to point at

  // Welch-averaged cross spectra over Hann frames
  const std::size_t window = std::min<std::size_t>(512, next_power_of_two(block.frame_count()) / 2);
  const std::size_t hop = window / 2;
  std::vector<Spectrogram> specs;
  specs.reserve(block.channel_count());
  StftOptions opt;
  opt.zero_pad_short_input = true;
  for (std::size_t c = 0; c < block.channel_count(); ++c)
    specs.push_back(stft(block.channel(c), window, hop, block.sample_rate(), opt));

  const auto pairs = mic_pairs(block.channel_count());
  const std::size_t bins = specs[0].bins();
  std::vector<std::vector<std::complex<double>>> cross(pairs.size(),
                                                       std::vector<std::complex<double>>(bins));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& a = specs[pairs[p].first];
    const auto& b = specs[pairs[p].second];
    for (std::size_t f = 0; f < a.frame_count(); ++f)
      for (std::size_t k = 0; k < bins; ++k) cross[p][k] += a.frames[f][k] * std::conj(b.frames[f][k]);
  }

  return steer_cross_spectra(cross, geometry, window, block.sample_rate(), grid_resolution_deg);
}

int gcc_phat_lag(std::span<const double> x, std::span<const double> y, int max_lag) {
  if (x.size() != y.size() || x.empty()) throw InvalidArgument("gcc inputs must match and be non-empty");
  if (max_lag <= 0) throw InvalidArgument("max_lag must be positive");

  const std::size_t n = next_power_of_two(2 * x.size());
  auto fx = rfft(x, n);
  auto fy = rfft(y, n);
  std::vector<std::complex<double>> g(fx.size());
  for (std::size_t k = 0; k < fx.size(); ++k) {
    const std::complex<double> c = fy[k] * std::conj(fx[k]);
    const double mag = std::abs(c);
    g[k] = mag > 1e-14 ? c / mag : std::complex<double>(0.0, 0.0);
  }
  const auto corr = irfft(g, n);

  // circular correlation: lag l >= 0 at corr[l], lag -l at corr[n - l]
  int best_lag = 0;
  double best = -1e300;
  for (int l = -max_lag; l <= max_lag; ++l) {
    const std::size_t idx = l >= 0 ? static_cast<std::size_t>(l) : n - static_cast<std::size_t>(-l);
    if (corr[idx] > best) {
      best = corr[idx];
      best_lag = l;
    }
  }
  return best_lag;
}

}  // namespace wakegate
