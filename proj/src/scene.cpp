#include "wakegate/scene.hpp"

#include <algorithm>
#include <cmath>

#include "wakegate/errors.hpp"
#include "wakegate/rng.hpp"
#include "wakegate/synth.hpp"

namespace wakegate {

ArrayGeometry ArrayGeometry::circular(std::size_t n, double radius_m) {
  ArrayGeometry g;
  g.mic_positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    g.mic_positions.push_back({radius_m * std::cos(a), radius_m * std::sin(a)});
  }
  return g;
}

double ArrayGeometry::max_radius() const {
  double r = 0.0;
  for (const auto& p : mic_positions) r = std::max(r, std::hypot(p[0], p[1]));
  return r;
}

void ArrayGeometry::validate() const {
  if (mic_positions.size() < 2) throw InvalidArgument("geometry needs at least 2 microphones");
  if (speed_of_sound <= 0.0) throw InvalidArgument("speed of sound must be positive");
  for (std::size_t i = 0; i < mic_positions.size(); ++i)
    for (std::size_t j = i + 1; j < mic_positions.size(); ++j) {
      const double dx = mic_positions[i][0] - mic_positions[j][0];
      const double dy = mic_positions[i][1] - mic_positions[j][1];
      if (std::hypot(dx, dy) < 1e-9) throw InvalidArgument("duplicate microphone positions");
    }
}

std::vector<double> delays_for_azimuth(const ArrayGeometry& geometry, double azimuth_deg) {
  geometry.validate();
  const double az = azimuth_deg * M_PI / 180.0;
  const double ux = std::cos(az);
  const double uy = std::sin(az);

  // relative to centroid so the delays are zero-mean for symmetric arrays
  double cx = 0.0, cy = 0.0;
  for (const auto& p : geometry.mic_positions) {
    cx += p[0];
    cy += p[1];
  }
  cx /= static_cast<double>(geometry.mic_count());
  cy /= static_cast<double>(geometry.mic_count());

  std::vector<double> delays;
  delays.reserve(geometry.mic_count());
  for (const auto& p : geometry.mic_positions) {
    const double proj = (p[0] - cx) * ux + (p[1] - cy) * uy;
    delays.push_back(-proj / geometry.speed_of_sound);
  }
  return delays;
}

std::vector<double> fractional_delay(std::span<const double> x, double delay_s, int sample_rate,
                                     int taps) {
  if (taps < 3 || taps % 2 == 0) throw InvalidArgument("fractional delay taps must be odd and >= 3");
  const double delay_samples = delay_s * sample_rate;
  if (std::abs(delay_samples) >= static_cast<double>(x.size()))
    throw InvalidArgument("delay exceeds signal length");

  const auto n0 = static_cast<long long>(std::floor(delay_samples));
  const double frac = delay_samples - static_cast<double>(n0);
  const int half = taps / 2;

  // Kernel centered at `half + frac`; for frac == 0 it degenerates to a pure
  // integer shift (sinc hits exact zeros).
  std::vector<double> h(static_cast<std::size_t>(taps));
  double dc = 0.0;
  for (int m = 0; m < taps; ++m) {
    const double t = static_cast<double>(m) - (static_cast<double>(half) + frac);
    const double sinc = t == 0.0 ? 1.0 : std::sin(M_PI * t) / (M_PI * t);
    const double w = 0.5 * (1.0 + std::cos(M_PI * t / (half + 1)));  // Hann taper over kernel span
    h[static_cast<std::size_t>(m)] = sinc * w;
    dc += h[static_cast<std::size_t>(m)];
  }
  for (auto& v : h) v /= dc;  // unity DC gain

  const auto n = static_cast<long long>(x.size());
  std::vector<double> out(x.size(), 0.0);
  for (long long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int m = 0; m < taps; ++m) {
      const long long src = i - n0 + half - m;
      if (src >= 0 && src < n) acc += h[static_cast<std::size_t>(m)] * x[static_cast<std::size_t>(src)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

namespace {

// Tail impulse response: seeded noise under a 60 dB/t60 exponential decay.
// Tail energy relative to the unit direct path grows with t60.
std::vector<double> reverb_tail(double t60_s, int rate, Rng& rng) {
  const double tail_energy = t60_s / (t60_s + 0.35);
  const auto gap = static_cast<std::size_t>(0.002 * rate);  // 2 ms before first reflection
  const auto len = static_cast<std::size_t>(std::min(t60_s, 1.2) * rate);
  std::vector<double> h(gap + len, 0.0);
  double e = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double env = std::pow(10.0, -3.0 * static_cast<double>(i) / (t60_s * rate));
    h[gap + i] = rng.normal() * env;
    e += h[gap + i] * h[gap + i];
  }
  if (e > 0.0) {
    const double g = std::sqrt(tail_energy / e);
    for (auto& v : h) v *= g;
  }
  return h;
}

std::vector<double> convolve(std::span<const double> x, std::span<const double> h,
                             std::size_t out_len) {
  std::vector<double> y(out_len, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const std::size_t jmax = std::min(h.size(), out_len - std::min(out_len, i));
    for (std::size_t j = 0; j < jmax && i + j < out_len; ++j) y[i + j] += xi * h[j];
  }
  return y;
}

}  // namespace

SceneOutput simulate_scene(const SceneSpec& scene, const ArrayGeometry& geometry) {
  geometry.validate();
  if (scene.sources.empty() && !scene.noise_level_db && !scene.echo)
    throw InvalidArgument("empty scene");
  if (scene.echo && scene.echo->path.empty())
    throw InvalidArgument("echo reference given without an echo path");

  std::size_t n = 0;
  for (const auto& s : scene.sources) {
    if (s.signal.channel_count() != 1) throw InvalidArgument("source signals must be mono");
    if (s.signal.sample_rate() != kCanonicalRate)
      throw InvalidArgument("source signal not at the canonical rate");
    if (s.distance_m <= 0.0 || s.distance_m > scene.max_distance_m)
      throw InvalidArgument("source distance out of range");
    n = std::max(n, s.signal.frame_count());
  }
  if (scene.echo) {
    if (scene.echo->reference.channel_count() != 1)
      throw InvalidArgument("echo reference must be mono");
    if (scene.echo->reference.sample_rate() != kCanonicalRate)
      throw InvalidArgument("echo reference not at the canonical rate");
    n = std::max(n, scene.echo->reference.frame_count());
  }
  if (n == 0 && scene.noise_level_db) n = static_cast<std::size_t>(kCanonicalRate);  // 1 s of floor
  if (n == 0) throw InvalidArgument("scene has no samples");

  const std::size_t mics = geometry.mic_count();
  SceneOutput out;
  out.mics = AudioBuffer(kCanonicalRate, mics, n);
  out.truth.seed = scene.seed;

  // direct paths
  std::vector<std::vector<double>> direct(mics, std::vector<double>(n, 0.0));
  for (std::size_t si = 0; si < scene.sources.size(); ++si) {
    const auto& s = scene.sources[si];
    const double gain = amplitude_of_db(s.level_db) / std::max(s.distance_m, 1.0);
    const auto delays = delays_for_azimuth(geometry, s.azimuth_deg);

    SourceTruth st;
    st.azimuth_deg = s.azimuth_deg;
    st.tags = s.tags;
    for (double d : delays) {
      st.delays_s.push_back(d);
      const double ds = d * kCanonicalRate;
      st.delay_samples_int.push_back(static_cast<int>(std::lround(ds)));
      st.delay_samples_frac.push_back(ds - std::round(ds));
    }
    out.truth.sources.push_back(std::move(st));

    std::vector<double> scaled(s.signal.channel(0).begin(), s.signal.channel(0).end());
    for (auto& v : scaled) v *= gain;
    if (si == 0) {
      std::vector<double> clean(n, 0.0);
      std::copy(scaled.begin(), scaled.end(), clean.begin());
      out.truth.clean_target = AudioBuffer::from_mono(std::move(clean), kCanonicalRate);
    }
    for (std::size_t m = 0; m < mics; ++m) {
      const auto delayed = fractional_delay(scaled, delays[m], kCanonicalRate);
      for (std::size_t i = 0; i < delayed.size(); ++i) direct[m][i] += delayed[i];
    }
  }

  // assemble: direct + reverb tail + noise + echo
  for (std::size_t m = 0; m < mics; ++m) {
    auto ch = out.mics.channel(m);
    for (std::size_t i = 0; i < n; ++i) ch[i] = direct[m][i];

    if (scene.t60_s > 0.0) {
      Rng tail_rng(mix_seed(scene.seed, 0x7a11 + m));
      const auto tail = reverb_tail(scene.t60_s, kCanonicalRate, tail_rng);
      const auto rev = convolve(direct[m], tail, n);
      for (std::size_t i = 0; i < n; ++i) ch[i] += rev[i];
    }

    if (scene.noise_level_db) {
      Rng noise_rng(mix_seed(scene.seed, 0x401e + m));
      const double target = amplitude_of_db(*scene.noise_level_db);
      for (std::size_t i = 0; i < n; ++i) ch[i] += target * noise_rng.normal();
    }
  }

  if (scene.echo) {
    const auto& ref = scene.echo->reference.channel(0);
    auto echo = convolve(ref, scene.echo->path, n);
    out.truth.echo_only = AudioBuffer::from_mono(echo, kCanonicalRate);
    for (std::size_t m = 0; m < mics; ++m) {
      auto ch = out.mics.channel(m);
      for (std::size_t i = 0; i < n; ++i) ch[i] += echo[i];
    }
  } else {
    out.truth.echo_only = AudioBuffer::from_mono(std::vector<double>(n, 0.0), kCanonicalRate);
  }

  // keep within [-1, 1]; scaling also applies to the truth signals so the
  // mix stays a linear function of them
  const double peak = out.mics.peak();
  if (peak > 1.0) {
    const double g = 1.0 / peak;
    out.mics.scale(g);
    out.truth.clean_target.scale(g);
    out.truth.echo_only.scale(g);
    out.truth.normalization_gain = g;
  }

  return out;
}

}  // namespace wakegate
