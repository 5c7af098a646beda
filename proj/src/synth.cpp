#include "wakegate/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "wakegate/errors.hpp"
#include "wakegate/fft.hpp"
#include "wakegate/rng.hpp"

namespace wakegate {

std::vector<double> make_sine(double freq_hz, double duration_s, int sample_rate,
                              double amplitude, double phase) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  std::vector<double> out(n);
  const double w = 2.0 * M_PI * freq_hz / sample_rate;
  for (std::size_t i = 0; i < n; ++i) out[i] = amplitude * std::sin(w * static_cast<double>(i) + phase);
  return out;
}

std::vector<double> make_white_noise(double duration_s, int sample_rate, std::uint64_t seed,
                                     double rms_target) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& s : out) s = rng.normal();
  const double r = rms(out);
  if (r > 0.0) {
    const double g = rms_target / r;
    for (auto& s : out) s *= g;
  }
  return out;
}

namespace {

// Two-pole resonator tuned to a center frequency and bandwidth.
struct Resonator {
  double b0 = 1, a1 = 0, a2 = 0;
  double z1 = 0, z2 = 0;

  void tune(double freq_hz, double bw_hz, int rate) {
    const double r = std::exp(-M_PI * bw_hz / rate);
    a1 = -2.0 * r * std::cos(2.0 * M_PI * freq_hz / rate);
    a2 = r * r;
    b0 = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(4.0 * M_PI * freq_hz / rate) + r * r);
  }

  double tick(double x) {
    const double y = b0 * x - a1 * z1 - a2 * z2;
    z2 = z1;
    z1 = y;
    return y;
  }
};

// Impulse train plus breath noise through two formant resonators.
std::vector<double> voiced_segment(std::size_t n, int rate, double pitch_hz, double f1, double f2,
                                   Rng& rng) {
  Resonator r1, r2;
  r1.tune(f1, 120.0, rate);
  r2.tune(f2, 180.0, rate);
  std::vector<double> out(n, 0.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phase += pitch_hz / rate;
    double exc = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      exc = 1.0;
    }
    exc += 0.02 * rng.normal();
    out[i] = r1.tick(exc) + 0.7 * r2.tick(exc);
  }
  return out;
}

void normalize_peak(std::vector<double>& x, double amplitude) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  if (p > 0.0) {
    const double g = amplitude / p;
    for (double& v : x) v *= g;
  }
}

}  // namespace

std::vector<double> make_speech_like(double duration_s, int sample_rate, std::uint64_t seed,
                                     double amplitude) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  Rng rng(seed);
  std::vector<double> out(n, 0.0);

  // syllables of 120..280 ms with short gaps
  std::size_t pos = 0;
  while (pos < n) {
    const auto seg = static_cast<std::size_t>(rng.uniform(0.12, 0.28) * sample_rate);
    const auto gap = static_cast<std::size_t>(rng.uniform(0.02, 0.08) * sample_rate);
    const std::size_t len = std::min(seg, n - pos);
    const double pitch = rng.uniform(95.0, 220.0);
    const double f1 = rng.uniform(300.0, 900.0);
    const double f2 = rng.uniform(1000.0, 2600.0);
    std::vector<double> syl = voiced_segment(len, sample_rate, pitch, f1, f2, rng);
    // raised-cosine fade to avoid clicks
    const std::size_t ramp = std::min<std::size_t>(len / 4, sample_rate / 100);
    for (std::size_t i = 0; i < ramp; ++i) {
      const double g = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(i) / ramp));
      syl[i] *= g;
      syl[len - 1 - i] *= g;
    }
    for (std::size_t i = 0; i < len; ++i) out[pos + i] += syl[i];
    pos += len + gap;
  }

  normalize_peak(out, amplitude);
  return out;
}

std::vector<double> make_word(const WordSpec& spec, int sample_rate) {
  if (spec.duration_s <= 0.0) throw InvalidArgument("word duration must be positive");
  Rng identity(spec.word_seed);
  Rng variant(mix_seed(spec.word_seed, spec.variant_seed + 1));

  const int n_syllables = 2 + static_cast<int>(identity.index(3));  // 2..4
  const double base_pitch = identity.uniform(100.0, 200.0) * spec.pitch_scale;

  struct Syl {
    double f1, f2, rel_len;
    bool fric_onset;
  };
  std::vector<Syl> syls;
  double total = 0.0;
  for (int s = 0; s < n_syllables; ++s) {
    Syl sy;
    sy.f1 = identity.uniform(280.0, 950.0);
    sy.f2 = identity.uniform(1000.0, 2700.0);
    sy.rel_len = identity.uniform(0.7, 1.3);
    sy.fric_onset = identity.uniform() < 0.4;
    total += sy.rel_len;
    syls.push_back(sy);
  }

  const double dur = spec.duration_s / spec.tempo;
  const auto n = static_cast<std::size_t>(std::llround(dur * sample_rate));
  std::vector<double> out(n, 0.0);

  std::size_t pos = 0;
  for (int s = 0; s < n_syllables; ++s) {
    const auto len = static_cast<std::size_t>(n * syls[s].rel_len / total);
    if (pos + len > n || len < 16) break;
    // small per-variant wobble mimics natural repetition
    const double pitch = base_pitch * (1.0 + 0.03 * variant.normal()) *
                         (1.0 - 0.1 * static_cast<double>(s) / n_syllables);
    const double f1 = syls[s].f1 * (1.0 + 0.02 * variant.normal());
    const double f2 = syls[s].f2 * (1.0 + 0.02 * variant.normal());
    std::vector<double> seg = voiced_segment(len, sample_rate, pitch, f1, f2, variant);
    if (syls[s].fric_onset) {
      const std::size_t fl = std::min<std::size_t>(len / 4, sample_rate / 50);
      Resonator fr;
      fr.tune(identity.uniform(3000.0, 6000.0), 1500.0, sample_rate);
      for (std::size_t i = 0; i < fl; ++i) seg[i] = 0.6 * fr.tick(variant.normal());
    }
    const std::size_t ramp = std::min<std::size_t>(len / 5, sample_rate / 80);
    for (std::size_t i = 0; i < ramp; ++i) {
      const double g = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(i) / ramp));
      seg[i] *= g;
      seg[len - 1 - i] *= g;
    }
    for (std::size_t i = 0; i < len; ++i) out[pos + i] += seg[i];
    pos += len;
  }

  if (spec.band_shift_hz > 0.0) {
    // heterodyne up, then keep only [shift, Nyquist)
    for (std::size_t i = 0; i < n; ++i)
      out[i] *= std::cos(2.0 * M_PI * spec.band_shift_hz * static_cast<double>(i) / sample_rate);
    const std::size_t m = next_power_of_two(n);
    auto bins = rfft(out, m);
    const double hz_per_bin = static_cast<double>(sample_rate) / static_cast<double>(m);
    for (std::size_t k = 0; k < bins.size(); ++k)
      if (static_cast<double>(k) * hz_per_bin < spec.band_shift_hz) bins[k] = {0.0, 0.0};
    auto time = irfft(bins, m);
    out.assign(time.begin(), time.begin() + static_cast<std::ptrdiff_t>(n));
  }

  normalize_peak(out, spec.amplitude);
  return out;
}

AudioBuffer mono_buffer(std::vector<double> samples, int sample_rate) {
  return AudioBuffer::from_mono(std::move(samples), sample_rate);
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double db_of(double amplitude) { return 20.0 * std::log10(std::max(amplitude, 1e-300)); }

double amplitude_of_db(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace wakegate
