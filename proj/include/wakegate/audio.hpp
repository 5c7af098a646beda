#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace wakegate {

// Canonical processing rate. Everything past file I/O assumes 16 kHz; files
// at other rates are rejected by the stages that need the canonical rate.
inline constexpr int kCanonicalRate = 16000;

// Planar multi-channel sample container. Samples are amplitudes in [-1, 1];
// all channels have the same length.
class AudioBuffer {
 public:
  AudioBuffer() = default;
  AudioBuffer(int sample_rate, std::size_t channels, std::size_t frames);

  static AudioBuffer from_mono(std::vector<double> samples, int sample_rate);

  int sample_rate() const { return sample_rate_; }
  std::size_t channel_count() const { return channels_.size(); }
  std::size_t frame_count() const { return channels_.empty() ? 0 : channels_[0].size(); }
  bool empty() const { return channels_.empty() || frame_count() == 0; }
  double duration_s() const;

  std::span<double> channel(std::size_t i);
  std::span<const double> channel(std::size_t i) const;
  std::vector<double>& channel_vec(std::size_t i);
  const std::vector<double>& channel_vec(std::size_t i) const;

  void append_channel(std::vector<double> samples);

  // Largest absolute sample across all channels.
  double peak() const;
  // True when every sample is finite.
  bool all_finite() const;
  // Scales every channel by g.
  void scale(double g);

 private:
  int sample_rate_ = kCanonicalRate;
  std::vector<std::vector<double>> channels_;
};

enum class WavDepth : std::uint8_t {
  pcm16,
  float32,
};

// Reads a RIFF/WAVE file (PCM16 or IEEE float32). Samples come back in
// [-1, 1]; rate and channel count are preserved.
// Throws IoError (missing file), WavHeaderError (corrupt container),
// WavEncodingError (valid RIFF but an encoding we do not decode).
AudioBuffer read_wav(const std::filesystem::path& path);

// Writes a canonical 44-byte-header RIFF/WAVE file. PCM16 output is clamped
// to [-1, 1] and rounded; float32 is written verbatim.
void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
               WavDepth depth = WavDepth::pcm16);

// Expected on-disk size in bytes for a buffer written at the given depth.
std::uint64_t wav_file_size(const AudioBuffer& buffer, WavDepth depth);

}  // namespace wakegate
