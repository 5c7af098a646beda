#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wakegate/audio.hpp"

namespace wakegate {

// Planar microphone array. Azimuths are degrees counterclockwise from the
// +x axis; sources are far-field plane waves.
struct ArrayGeometry {
  std::vector<std::array<double, 2>> mic_positions;  // meters
  double speed_of_sound = 343.0;

  // n mics equally spaced on a circle, mic 0 on the +x axis.
  static ArrayGeometry circular(std::size_t n = 4, double radius_m = 0.032);

  std::size_t mic_count() const { return mic_positions.size(); }
  double max_radius() const;
  void validate() const;
};

// Per-mic arrival time in seconds relative to the array centroid for a
// plane wave from the given azimuth: d_i = -(p_i . u) / c.
std::vector<double> delays_for_azimuth(const ArrayGeometry& geometry, double azimuth_deg);

// Windowed-sinc fractional delay (31 taps by default). Positive delay moves
// the signal later; samples shifted past either end are dropped and the
// vacated region is zero. Integer delays are exact.
std::vector<double> fractional_delay(std::span<const double> x, double delay_s, int sample_rate,
                                     int taps = 31);

struct SourceSpec {
  double azimuth_deg = 0.0;
  double distance_m = 1.0;  // far-field; scales level only
  double level_db = 0.0;
  AudioBuffer signal;  // mono at the canonical rate
  std::vector<std::string> tags;
};

struct EchoSpec {
  AudioBuffer reference;      // what the loudspeaker plays
  std::vector<double> path;   // impulse response loudspeaker -> mics
};

struct SceneSpec {
  std::vector<SourceSpec> sources;
  std::optional<double> noise_level_db;  // diffuse floor (dBFS RMS); absent = none
  double t60_s = 0.0;
  std::optional<EchoSpec> echo;
  std::uint64_t seed = 0;
  double max_distance_m = 5.0;
};

struct SourceTruth {
  double azimuth_deg = 0.0;
  std::vector<double> delays_s;        // per mic
  std::vector<int> delay_samples_int;  // nearest sample
  std::vector<double> delay_samples_frac;
  std::vector<std::string> tags;
};

struct SceneTruth {
  std::vector<SourceTruth> sources;
  AudioBuffer clean_target;  // source 0 at the array centroid, gain applied
  AudioBuffer echo_only;     // echo path convolved with the reference
  double normalization_gain = 1.0;  // applied to keep |sample| <= 1
  std::uint64_t seed = 0;
};

struct SceneOutput {
  AudioBuffer mics;  // one channel per microphone
  SceneTruth truth;
};

// Deterministic mixdown: per mic, delayed sources + seeded diffuse noise +
// an exponentially decaying reverberant tail (set by t60) + the echo path.
// The whole output is rescaled only if it would clip, and the factor is
// recorded in the truth block.
SceneOutput simulate_scene(const SceneSpec& scene, const ArrayGeometry& geometry);

}  // namespace wakegate
