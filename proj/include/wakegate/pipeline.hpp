#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wakegate/aec.hpp"
#include "wakegate/audio.hpp"
#include "wakegate/scene.hpp"

namespace wakegate {

struct DspConfig {
  std::size_t stft_window = 512;
  std::size_t stft_hop = 128;
  AecConfig aec;
  double subtraction_alpha = 2.0;
  double spectral_floor_beta = 0.01;
  double noise_window_s = 1.5;
  std::size_t noise_seed_frames = 10;
  std::size_t wpe_delay = 2;
  std::size_t wpe_order = 10;
  int wpe_iterations = 2;
  double doa_grid_deg = 5.0;
  // confidence below this holds the previous steering angle
  double doa_hold_confidence = 1.5;
  bool enable_wpe = true;
  bool enable_noise_suppression = true;
};

struct DoaTrackPoint {
  std::size_t frame = 0;
  bool has_source = false;
  double azimuth_deg = 0.0;
  double confidence = 0.0;
};

// The six logical channels the firmware exposes: processed mono, four raw
// mics, and their average.
struct ChannelBundle {
  AudioBuffer ch0;                 // beamformed, dereverberated, denoised
  std::array<AudioBuffer, 4> raw;  // ch1..ch4
  AudioBuffer ch5;                 // mean of the raw mics
  std::vector<DoaTrackPoint> doa_track;
  bool aec_engaged = false;

  // Interleaves all six channels into one buffer for WAV export.
  AudioBuffer to_multichannel() const;
};

// Full front-end chain over a 4-mic capture: optional per-mic echo
// cancellation against the loudspeaker reference, per-frame direction
// estimate, steered delay-and-sum, late-reverb prediction, then spectral
// subtraction. Raw mics pass through untouched as ch1..ch4.
ChannelBundle process_pipeline(const AudioBuffer& mics, const std::optional<AudioBuffer>& echo_ref,
                               const DspConfig& config, const ArrayGeometry& geometry);

// DoA track serialization: one `frame_index,azimuth_deg,confidence` line per
// frame, azimuth blank when no source was found.
std::string doa_track_to_text(const std::vector<DoaTrackPoint>& track);

}  // namespace wakegate
