#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wakegate/dereverb.hpp"
#include "wakegate/errors.hpp"
#include "wakegate/noise.hpp"
#include "wakegate/scene.hpp"
#include "wakegate/stft.hpp"
#include "wakegate/synth.hpp"

using namespace wakegate;

TEST_CASE("noise estimate: stationary white noise floor within 3 dB per bin") {
  const auto x = make_white_noise(4.0, 16000, 55, 0.1);
  const auto spec = stft(x, 512, 128, 16000);
  const auto est = estimate_noise(spec, 10, 1.5);

  // oracle: the true per-bin magnitude is the average over all frames of
  // this known generated noise
  std::vector<double> true_mag(spec.bins(), 0.0);
  for (const auto& f : spec.frames)
    for (std::size_t k = 0; k < spec.bins(); ++k) true_mag[k] += std::abs(f[k]);
  for (auto& m : true_mag) m /= static_cast<double>(spec.frame_count());

  double db_err = 0.0;
  for (std::size_t k = 1; k + 1 < spec.bins(); ++k)
    db_err += std::abs(20.0 * std::log10(std::max(est.floor_mag[k], 1e-12) / true_mag[k]));
  db_err /= static_cast<double>(spec.bins() - 2);
  CHECK(db_err < 3.0);
}

TEST_CASE("noise estimate: silence gives a zero floor") {
  std::vector<double> x(16000, 0.0);
  const auto est = estimate_noise(stft(x, 512, 128, 16000));
  for (double f : est.floor_mag) CHECK(f == 0.0);
}

TEST_CASE("noise estimate: floor tracks noise, not speech") {
  // noise-only lead-in, then speech over the same noise
  auto x = make_white_noise(4.0, 16000, 66, 0.05);
  const auto speech = make_speech_like(2.0, 16000, 67, 0.5);
  for (std::size_t i = 0; i < speech.size(); ++i) x[32000 + i] += speech[i];

  const auto spec = stft(x, 512, 128, 16000);
  const auto noise_only = stft(make_white_noise(4.0, 16000, 66, 0.05), 512, 128, 16000);

  // per-frame tracking with identical parameters
  NoiseTracker tracker(spec.bins(), 187, 10);
  std::vector<std::vector<double>> floors;
  for (const auto& f : spec.frames) {
    tracker.update(f);
    floors.push_back(tracker.floor_mag());
  }

  // true noise magnitude per bin from the noise-only realization
  std::vector<double> true_mag(spec.bins(), 0.0);
  for (const auto& f : noise_only.frames)
    for (std::size_t k = 0; k < spec.bins(); ++k) true_mag[k] += std::abs(f[k]);
  for (auto& m : true_mag) m /= static_cast<double>(noise_only.frame_count());

  // during the speech region the floor must stay near the noise level
  const std::size_t speech_start = 32000 / 128;
  const std::size_t speech_end = (32000 + speech.size()) / 128 - 4;
  for (std::size_t f = speech_start; f < speech_end; f += 7) {
    double mean_db = 0.0;
    std::size_t cnt = 0;
    for (std::size_t k = 1; k + 1 < spec.bins(); ++k) {
      mean_db += 20.0 * std::log10(std::max(floors[f][k], 1e-12) / true_mag[k]);
      ++cnt;
    }
    CHECK(mean_db / static_cast<double>(cnt) <= 3.0);
  }
}

TEST_CASE("noise estimate: too few frames is an error") {
  const auto spec = stft(make_white_noise(0.1, 16000, 1, 0.1), 512, 128, 16000);
  CHECK_THROWS_AS(estimate_noise(spec, 64, 1.5), InvalidArgument);
}

TEST_CASE("suppress: zero noise estimate is the identity") {
  const auto spec = stft(make_speech_like(0.5, 16000, 70, 0.5), 512, 128, 16000);
  NoiseEstimate zero;
  zero.floor_mag.assign(spec.bins(), 0.0);
  const auto out = suppress_noise(spec, zero, 2.0, 0.01);
  for (std::size_t f = 0; f < spec.frame_count(); ++f)
    for (std::size_t k = 0; k < spec.bins(); ++k)
      CHECK(std::abs(out.frames[f][k] - spec.frames[f][k]) < 1e-12);
}

TEST_CASE("suppress: pure stationary noise drops by at least 10 dB") {
  const auto x = make_white_noise(3.0, 16000, 71, 0.1);
  const auto spec = stft(x, 512, 128, 16000);
  const auto est = estimate_noise(spec, 10, 1.5);
  const auto out = suppress_noise(spec, est, 2.0, 0.01);

  const auto y = istft(out);
  const double in_e = oracle::energy(std::span<const double>(x).subspan(512, x.size() - 1024));
  const double out_e =
      oracle::energy(std::span<const double>(y.channel(0)).subspan(512, x.size() - 1024));
  CHECK(oracle::db_ratio(in_e, out_e) >= 10.0);
}

TEST_CASE("suppress: respects the spectral floor and never amplifies") {
  const auto x = make_speech_like(1.0, 16000, 72, 0.4);
  auto noisy = x;
  const auto n = make_white_noise(1.0, 16000, 73, 0.05);
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += n[i];

  const auto spec = stft(noisy, 512, 128, 16000);
  const auto est = estimate_noise(spec, 10, 1.5);
  const double beta = 0.01;
  const auto out = suppress_noise(spec, est, 2.0, beta);

  for (std::size_t f = 0; f < spec.frame_count(); ++f)
    for (std::size_t k = 0; k < spec.bins(); ++k) {
      const double in_mag = std::abs(spec.frames[f][k]);
      const double out_mag = std::abs(out.frames[f][k]);
      CHECK(out_mag <= in_mag * (1.0 + 1e-9));
      CHECK(out_mag >= beta * in_mag * (1.0 - 1e-9));
    }
}

TEST_CASE("suppress: sine plus noise gains at least 5 dB segmental snr") {
  const int rate = 16000;
  const auto clean = make_sine(440.0, 2.5, rate, 0.3);
  // noise-only lead-in seeds the tracker honestly
  auto noisy = make_white_noise(3.0, rate, 74, 0.3 / std::sqrt(2.0) / std::pow(10.0, 0.5));
  std::vector<double> padded_clean(noisy.size(), 0.0);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    noisy[8000 + i] += clean[i];
    padded_clean[8000 + i] = clean[i];
  }

  const auto spec = stft(noisy, 512, 128, rate);

  // causal per-frame tracking and subtraction, as the pipeline runs it
  NoiseTracker tracker(spec.bins(), 187, 10);
  Spectrogram cleaned = spec;
  for (std::size_t f = 0; f < spec.frame_count(); ++f) {
    tracker.update(spec.frames[f]);
    const auto& floor_mag = tracker.floor_mag();
    for (std::size_t k = 0; k < spec.bins(); ++k) {
      const double mag = std::abs(cleaned.frames[f][k]);
      if (mag <= 0.0) continue;
      const double kept = std::max(mag - 2.0 * floor_mag[k], 0.01 * mag);
      cleaned.frames[f][k] *= kept / mag;
    }
  }
  const auto y = istft(cleaned);

  const std::size_t lo = 8000 + 512;
  const std::size_t hi = 8000 + clean.size() - 512;
  const double before = oracle::segmental_snr(
      std::span<const double>(padded_clean).subspan(lo, hi - lo),
      std::span<const double>(noisy).subspan(lo, hi - lo), rate, 0);
  const double after = oracle::segmental_snr(
      std::span<const double>(padded_clean).subspan(lo, hi - lo),
      std::span<const double>(y.channel(0)).subspan(lo, hi - lo), rate, 0);
  CHECK(after - before >= 5.0);
}

TEST_CASE("dereverb: anechoic input is nearly untouched") {
  const auto x = make_speech_like(1.5, 16000, 80, 0.5);
  const auto spec = stft(x, 512, 128, 16000);
  const auto out = dereverberate(spec, 2, 10, 2);
  const auto y = istft(out);

  const double corr = oracle::correlation(std::span<const double>(x).subspan(0, y.frame_count()),
                                          y.channel(0));
  CHECK(corr >= 0.99);
}

TEST_CASE("dereverb: improves the direct-to-reverberant ratio at t60 0.6") {
  SceneSpec scene;
  SourceSpec src;
  src.azimuth_deg = 0.0;
  src.signal = mono_buffer(make_speech_like(3.0, 16000, 81, 0.5));
  scene.sources.push_back(src);
  scene.t60_s = 0.6;
  scene.seed = 82;
  const auto out = simulate_scene(scene, ArrayGeometry::circular());

  const auto& clean = out.truth.clean_target.channel_vec(0);
  const auto mic = out.mics.channel(0);

  const auto spec = stft(mic, 512, 128, 16000);
  const auto drv = istft(dereverberate(spec, 2, 10, 2));
  const auto bypass = istft(spec);

  const double drr_bypass = oracle::snr_vs_reference(clean, bypass.channel(0), 4, 60);
  const double drr_wpe = oracle::snr_vs_reference(clean, drv.channel(0), 4, 60);
  CHECK(drr_wpe - drr_bypass >= 3.0);
}

TEST_CASE("dereverb: deterministic") {
  const auto x = make_speech_like(1.0, 16000, 83, 0.5);
  const auto spec = stft(x, 512, 128, 16000);
  const auto a = dereverberate(spec, 2, 10, 2);
  const auto b = dereverberate(spec, 2, 10, 2);
  for (std::size_t f = 0; f < a.frame_count(); ++f)
    for (std::size_t k = 0; k < a.bins(); ++k) CHECK(a.frames[f][k] == b.frames[f][k]);
}

TEST_CASE("dereverb: all-zero bins survive (regularization, no division blowups)") {
  Spectrogram spec;
  spec.window_size = 64;
  spec.hop = 16;
  spec.sample_rate = 16000;
  spec.frames.assign(40, std::vector<std::complex<double>>(33, {0.0, 0.0}));
  for (std::size_t f = 0; f < 40; ++f) spec.frames[f][5] = {0.1 * std::sin(0.3 * f), 0.05};
  const auto out = dereverberate(spec, 2, 10, 2);
  for (const auto& frame : out.frames)
    for (const auto& c : frame) {
      CHECK(std::isfinite(c.real()));
      CHECK(std::isfinite(c.imag()));
    }
}

TEST_CASE("dereverb: too few frames is an error") {
  Spectrogram spec;
  spec.window_size = 64;
  spec.hop = 16;
  spec.frames.assign(10, std::vector<std::complex<double>>(33, {0.1, 0.0}));
  CHECK_THROWS_AS(dereverberate(spec, 2, 10, 2), InvalidArgument);
}
