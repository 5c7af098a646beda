#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wakegate/errors.hpp"
#include "wakegate/scene.hpp"
#include "wakegate/scene_io.hpp"
#include "wakegate/synth.hpp"

using namespace wakegate;

TEST_CASE("delays: broadside pair has zero delay") {
  ArrayGeometry g;
  g.mic_positions = {{0.032, 0.0}, {-0.032, 0.0}};
  const auto d = delays_for_azimuth(g, 90.0);
  CHECK(std::abs(d[0]) < 1e-12);
  CHECK(std::abs(d[1]) < 1e-12);
}

TEST_CASE("delays: endfire pair separation matches hand geometry") {
  ArrayGeometry g;
  g.mic_positions = {{0.032, 0.0}, {-0.032, 0.0}};
  const auto d = delays_for_azimuth(g, 0.0);
  // 0.064 m apart at 343 m/s
  CHECK(std::abs(d[1] - d[0]) == doctest::Approx(0.064 / 343.0).epsilon(1e-9));
  CHECK(d[0] < d[1]);  // mic on the +x side hears the 0-degree source first
}

TEST_CASE("delays: rotating the source by 180 degrees negates every delay") {
  const auto g = ArrayGeometry::circular(4, 0.032);
  for (double az : {0.0, 37.0, 123.4, 275.0}) {
    const auto d1 = delays_for_azimuth(g, az);
    const auto d2 = delays_for_azimuth(g, az + 180.0);
    for (std::size_t m = 0; m < d1.size(); ++m)
      CHECK(d1[m] == doctest::Approx(-d2[m]).epsilon(1e-12));
  }
}

TEST_CASE("delays: bounded by radius over c") {
  const auto g = ArrayGeometry::circular(4, 0.032);
  for (double az = 0.0; az < 360.0; az += 7.0) {
    for (double d : delays_for_azimuth(g, az)) CHECK(std::abs(d) <= 0.032 / 343.0 + 1e-15);
  }
}

TEST_CASE("fractional delay: zero delay is identity") {
  const auto x = make_white_noise(0.05, 16000, 2, 0.3);
  const auto y = fractional_delay(x, 0.0, 16000);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-9);
}

TEST_CASE("fractional delay: integer shift moves an impulse exactly") {
  std::vector<double> x(256, 0.0);
  x[100] = 1.0;
  const auto y = fractional_delay(x, 5.0 / 16000.0, 16000);
  CHECK(y[105] == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 0; i < y.size(); ++i)
    if (i != 105) CHECK(std::abs(y[i]) < 1e-3);
}

TEST_CASE("fractional delay: half-sample phase shift on a sine") {
  // analytic oracle: delay of 0.5 samples shifts a 1 kHz tone at 16 kHz by
  // 0.5 * 2*pi*1000/16000 radians, measured with a single-bin dft
  const int rate = 16000;
  const double freq = 1000.0;
  const auto x = make_sine(freq, 0.128, rate, 0.8);
  const auto y = fractional_delay(x, 0.5 / rate, rate);

  auto phase_at = [&](const std::vector<double>& s) {
    std::complex<double> acc(0.0, 0.0);
    // skip kernel edges where the convolution is partial
    for (std::size_t i = 64; i < s.size() - 64; ++i) {
      const double ang = -2.0 * M_PI * freq * static_cast<double>(i) / rate;
      acc += s[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return std::arg(acc);
  };

  const double expected = 0.5 * 2.0 * M_PI * freq / rate;
  double got = phase_at(x) - phase_at(y);
  while (got < -M_PI) got += 2.0 * M_PI;
  while (got > M_PI) got -= 2.0 * M_PI;
  CHECK(got == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("fractional delay: group delay accurate across the passband") {
  const int rate = 16000;
  for (double freq : {500.0, 1000.0, 2000.0, 3000.0}) {
    const double delay = 3.3 / rate;
    const auto x = make_sine(freq, 0.128, rate, 0.5);
    const auto y = fractional_delay(x, delay, rate);
    std::complex<double> xa(0, 0), ya(0, 0);
    for (std::size_t i = 64; i < x.size() - 64; ++i) {
      const double ang = -2.0 * M_PI * freq * static_cast<double>(i) / rate;
      const std::complex<double> e(std::cos(ang), std::sin(ang));
      xa += x[i] * e;
      ya += y[i] * e;
    }
    double dphi = std::arg(xa) - std::arg(ya);
    while (dphi < -M_PI) dphi += 2.0 * M_PI;
    while (dphi > M_PI) dphi -= 2.0 * M_PI;
    const double measured_delay_samples = dphi / (2.0 * M_PI * freq) * rate;
    CHECK(std::abs(measured_delay_samples - 3.3) < 0.05);
  }
}

TEST_CASE("fractional delay: rejects delays past the signal") {
  std::vector<double> x(16, 0.0);
  CHECK_THROWS_AS(fractional_delay(x, 20.0 / 16000.0, 16000), InvalidArgument);
}

TEST_CASE("scene: clean single source is exactly the delayed source") {
  SceneSpec scene;
  SourceSpec src;
  src.azimuth_deg = 30.0;
  src.distance_m = 1.0;
  src.signal = mono_buffer(make_speech_like(0.5, 16000, 4, 0.5));
  scene.sources.push_back(src);
  scene.seed = 1;

  const auto g = ArrayGeometry::circular(4, 0.032);
  const auto out = simulate_scene(scene, g);
  REQUIRE(out.mics.channel_count() == 4);

  const auto delays = delays_for_azimuth(g, 30.0);
  for (std::size_t m = 0; m < 4; ++m) {
    const auto expected = fractional_delay(src.signal.channel(0), delays[m], 16000);
    for (std::size_t i = 0; i < expected.size(); ++i)
      CHECK(std::abs(out.mics.channel(m)[i] - expected[i]) < 1e-12);
  }
}

TEST_CASE("scene: noise-only rms lands on the requested level") {
  SceneSpec scene;
  scene.noise_level_db = -30.0;
  scene.seed = 77;
  const auto out = simulate_scene(scene, ArrayGeometry::circular());
  for (std::size_t m = 0; m < 4; ++m) {
    const double level = db_of(rms(out.mics.channel(m)));
    CHECK(std::abs(level - (-30.0)) < 0.5);
  }
}

TEST_CASE("scene: same spec and seed give bit-identical output") {
  SceneSpec scene;
  SourceSpec src;
  src.azimuth_deg = 200.0;
  src.signal = mono_buffer(make_speech_like(0.4, 16000, 8, 0.4));
  scene.sources.push_back(src);
  scene.noise_level_db = -25.0;
  scene.t60_s = 0.3;
  scene.seed = 42;

  const auto a = simulate_scene(scene, ArrayGeometry::circular());
  const auto b = simulate_scene(scene, ArrayGeometry::circular());
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t i = 0; i < a.mics.frame_count(); ++i)
      CHECK(a.mics.channel(m)[i] == b.mics.channel(m)[i]);
}

TEST_CASE("scene: superposition of disjoint sources") {
  const auto sig_a = mono_buffer(make_speech_like(0.5, 16000, 31, 0.3));
  const auto sig_b = mono_buffer(make_sine(700.0, 0.5, 16000, 0.2));

  SceneSpec a, b, both;
  SourceSpec sa, sb;
  sa.azimuth_deg = 10.0;
  sa.signal = sig_a;
  sb.azimuth_deg = 250.0;
  sb.signal = sig_b;
  a.sources = {sa};
  b.sources = {sb};
  both.sources = {sa, sb};
  a.seed = b.seed = both.seed = 5;
  a.t60_s = b.t60_s = both.t60_s = 0.2;

  const auto g = ArrayGeometry::circular();
  const auto ra = simulate_scene(a, g);
  const auto rb = simulate_scene(b, g);
  const auto rboth = simulate_scene(both, g);

  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t i = 0; i < rboth.mics.frame_count(); ++i)
      CHECK(std::abs(rboth.mics.channel(m)[i] -
                     (ra.mics.channel(m)[i] + rb.mics.channel(m)[i])) < 1e-6);
}

TEST_CASE("scene: echo truth carries the convolved reference") {
  SceneSpec scene;
  EchoSpec echo;
  echo.reference = mono_buffer(make_white_noise(0.3, 16000, 12, 0.2));
  echo.path = {0.5, 0.0, 0.0, -0.25};
  scene.echo = echo;
  scene.seed = 3;

  const auto out = simulate_scene(scene, ArrayGeometry::circular());
  // every mic carries exactly the echo (no sources, no noise)
  for (std::size_t i = 0; i < out.mics.frame_count(); ++i)
    CHECK(out.mics.channel(0)[i] == doctest::Approx(out.truth.echo_only.channel(0)[i]));

  const auto& ref = echo.reference.channel_vec(0);
  CHECK(out.truth.echo_only.channel(0)[0] == doctest::Approx(0.5 * ref[0]));
  CHECK(out.truth.echo_only.channel(0)[3] ==
        doctest::Approx(0.5 * ref[3] - 0.25 * ref[0]));
}

TEST_CASE("scene: validation errors") {
  CHECK_THROWS_AS(simulate_scene(SceneSpec{}, ArrayGeometry::circular()), InvalidArgument);

  SceneSpec far;
  SourceSpec src;
  src.azimuth_deg = 0.0;
  src.distance_m = 9.0;  // past the 5 m default
  src.signal = mono_buffer(make_sine(440.0, 0.1, 16000, 0.1));
  far.sources.push_back(src);
  CHECK_THROWS_AS(simulate_scene(far, ArrayGeometry::circular()), InvalidArgument);

  SceneSpec bad_rate;
  SourceSpec s2;
  s2.azimuth_deg = 0.0;
  s2.signal = AudioBuffer::from_mono(std::vector<double>(800, 0.0), 8000);
  bad_rate.sources.push_back(s2);
  CHECK_THROWS_AS(simulate_scene(bad_rate, ArrayGeometry::circular()), InvalidArgument);

  ArrayGeometry dup;
  dup.mic_positions = {{0.0, 0.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(dup.validate(), InvalidArgument);
}

TEST_CASE("scene file: parse, simulate, reject unknown keys") {
  const Json doc = Json::parse(R"({
    "schema_version": 1,
    "seed": 9,
    "noise_level_db": -40.0,
    "sources": [
      {"azimuth_deg": 60.0, "signal": {"kind": "speech", "duration_s": 0.5, "seed": 2}}
    ]
  })");
  const LoadedScene loaded = parse_scene(doc, ".");
  CHECK(loaded.scene.sources.size() == 1);
  CHECK(loaded.scene.noise_level_db == doctest::Approx(-40.0));
  CHECK(loaded.geometry.mic_count() == 4);
  const auto out = simulate_scene(loaded.scene, loaded.geometry);
  CHECK(out.mics.frame_count() == 8000);

  Json bad = doc;
  bad["reverb"] = 0.6;  // not a key
  CHECK_THROWS_AS(parse_scene(bad, "."), FormatError);

  Json bad_src = doc;
  bad_src["sources"][0]["azimuth"] = 60.0;  // misspelled
  CHECK_THROWS_AS(parse_scene(bad_src, "."), FormatError);
}

TEST_CASE("scene: ultrasonic tag rides through to the truth block") {
  SceneSpec scene;
  SourceSpec src;
  src.azimuth_deg = 45.0;
  WordSpec w;
  w.word_seed = 4;
  w.band_shift_hz = 6000.0;
  src.signal = mono_buffer(make_word(w, 16000));
  src.tags = {"ultrasonic"};
  scene.sources.push_back(src);
  const auto out = simulate_scene(scene, ArrayGeometry::circular());
  REQUIRE(out.truth.sources.size() == 1);
  CHECK(out.truth.sources[0].tags == std::vector<std::string>{"ultrasonic"});

  // the band-shifted word really lives in the 6..8 kHz band
  const auto spec = oracle::direct_dft(src.signal.channel(0));
  double low = 0.0, high = 0.0;
  const double hz_per_bin = 16000.0 / static_cast<double>(src.signal.frame_count());
  for (std::size_t k = 0; k < spec.size() / 2; ++k) {
    const double f = static_cast<double>(k) * hz_per_bin;
    (f < 5500.0 ? low : high) += std::norm(spec[k]);
  }
  CHECK(high > 100.0 * low);
}
