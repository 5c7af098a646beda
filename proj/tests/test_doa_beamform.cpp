#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wakegate/beamform.hpp"
#include "wakegate/doa.hpp"
#include "wakegate/errors.hpp"
#include "wakegate/rng.hpp"
#include "wakegate/scene.hpp"
#include "wakegate/synth.hpp"

using namespace wakegate;

namespace {

SceneOutput clean_scene(double azimuth_deg, std::uint64_t seed, double dur = 0.6) {
  SceneSpec scene;
  SourceSpec src;
  src.azimuth_deg = azimuth_deg;
  src.signal = mono_buffer(make_speech_like(dur, 16000, seed, 0.5));
  scene.sources.push_back(src);
  scene.seed = seed;
  return simulate_scene(scene, ArrayGeometry::circular());
}

}  // namespace

TEST_CASE("doa: clean source recovered within the grid step") {
  const auto g = ArrayGeometry::circular();
  for (double az : {0.0, 60.0, 145.0, 300.0}) {
    const auto out = clean_scene(az, 19);
    const DoaResult r = estimate_doa(out.mics, g, 5.0);
    REQUIRE(r.has_source);
    double err = std::abs(r.azimuth_deg - az);
    err = std::min(err, 360.0 - err);
    CHECK(err <= 5.0);
  }
}

TEST_CASE("doa: silence reports no source rather than an angle") {
  AudioBuffer zeros(16000, 4, 4000);
  const DoaResult r = estimate_doa(zeros, ArrayGeometry::circular(), 5.0);
  CHECK_FALSE(r.has_source);
}

TEST_CASE("doa: block shorter than the aperture is rejected") {
  AudioBuffer tiny(16000, 4, 4);
  CHECK_THROWS_AS(estimate_doa(tiny, ArrayGeometry::circular(), 5.0), InvalidArgument);
}

TEST_CASE("gcc-phat lag equals brute-force cross-correlation argmax") {
  Rng rng(1234);
  for (int trial = 0; trial < 8; ++trial) {
    const int true_lag = static_cast<int>(rng.index(13)) - 6;
    const auto base = make_white_noise(0.05, 16000, 100 + static_cast<std::uint64_t>(trial), 0.4);
    std::vector<double> x = base;
    std::vector<double> y(base.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const long long src = static_cast<long long>(i) - true_lag;
      if (src >= 0 && src < static_cast<long long>(base.size()))
        y[i] = base[static_cast<std::size_t>(src)];
    }

    const int got = gcc_phat_lag(x, y, 16);
    const int want = oracle::xcorr_argmax(x, y, 16);
    CHECK(got == want);
    CHECK(got == true_lag);
  }
}

TEST_CASE("beamform: identical broadside signals pass through untouched") {
  ArrayGeometry g;
  g.mic_positions = {{0.032, 0.0}, {-0.032, 0.0}};
  const auto sig = make_speech_like(0.3, 16000, 6, 0.5);
  AudioBuffer mics(16000, 2, sig.size());
  for (std::size_t m = 0; m < 2; ++m)
    std::copy(sig.begin(), sig.end(), mics.channel(m).begin());

  const AudioBuffer out = beamform_das(mics, g, 90.0);
  for (std::size_t i = 0; i < sig.size(); ++i) CHECK(std::abs(out.channel(0)[i] - sig[i]) < 1e-6);
}

TEST_CASE("beamform: steering at the true azimuth recovers the source") {
  const auto out = clean_scene(45.0, 23);
  const AudioBuffer beam = beamform_das(out.mics, ArrayGeometry::circular(), 45.0);
  const double corr =
      oracle::correlation(beam.channel(0), out.truth.clean_target.channel(0));
  CHECK(corr >= 0.999);
}

TEST_CASE("beamform: unity gain on the aligned coherent source") {
  const auto out = clean_scene(120.0, 29);
  const AudioBuffer beam = beamform_das(out.mics, ArrayGeometry::circular(), 120.0);
  const double in_power = oracle::energy(out.truth.clean_target.channel(0));
  const auto fit = oracle::fir_fit(out.truth.clean_target.channel(0), beam.channel(0), 8, 8);
  const double passed_power = oracle::energy(fit);
  // never loses more than a tenth of a dB of the coherent source
  CHECK(oracle::db_ratio(passed_power, in_power) > -0.1);
}

TEST_CASE("beamform: white-noise gain near 6 dB for 4 mics") {
  AudioBuffer mics(16000, 4, 48000);
  double in_power = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    const auto n = make_white_noise(3.0, 16000, 500 + m, 0.2);
    std::copy(n.begin(), n.end(), mics.channel(m).begin());
    in_power += oracle::energy(n) / 4.0;
  }
  const AudioBuffer out = beamform_das(mics, ArrayGeometry::circular(), 77.0);
  const double gain_db = oracle::db_ratio(in_power, oracle::energy(out.channel(0)));
  CHECK(gain_db > 5.0);
  CHECK(gain_db < 7.0);
}
