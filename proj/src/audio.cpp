#include "wakegate/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "wakegate/errors.hpp"

namespace wakegate {

AudioBuffer::AudioBuffer(int sample_rate, std::size_t channels, std::size_t frames)
    : sample_rate_(sample_rate), channels_(channels, std::vector<double>(frames, 0.0)) {
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  if (channels == 0) throw InvalidArgument("channel count must be >= 1");
}

AudioBuffer AudioBuffer::from_mono(std::vector<double> samples, int sample_rate) {
  AudioBuffer b;
  b.sample_rate_ = sample_rate;
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  b.channels_.push_back(std::move(samples));
  return b;
}

double AudioBuffer::duration_s() const {
  return static_cast<double>(frame_count()) / static_cast<double>(sample_rate_);
}

std::span<double> AudioBuffer::channel(std::size_t i) {
  if (i >= channels_.size()) throw InvalidArgument("channel index out of range");
  return channels_[i];
}

std::span<const double> AudioBuffer::channel(std::size_t i) const {
  if (i >= channels_.size()) throw InvalidArgument("channel index out of range");
  return channels_[i];
}

std::vector<double>& AudioBuffer::channel_vec(std::size_t i) {
  if (i >= channels_.size()) throw InvalidArgument("channel index out of range");
  return channels_[i];
}

const std::vector<double>& AudioBuffer::channel_vec(std::size_t i) const {
  if (i >= channels_.size()) throw InvalidArgument("channel index out of range");
  return channels_[i];
}

void AudioBuffer::append_channel(std::vector<double> samples) {
  if (!channels_.empty() && samples.size() != frame_count())
    throw InvalidArgument("channel length mismatch");
  channels_.push_back(std::move(samples));
}

double AudioBuffer::peak() const {
  double p = 0.0;
  for (const auto& ch : channels_)
    for (double s : ch) p = std::max(p, std::abs(s));
  return p;
}

bool AudioBuffer::all_finite() const {
  for (const auto& ch : channels_)
    for (double s : ch)
      if (!std::isfinite(s)) return false;
  return true;
}

void AudioBuffer::scale(double g) {
  for (auto& ch : channels_)
    for (double& s : ch) s *= g;
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav file: " + path.string());

  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12) throw WavHeaderError("file too short for RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw WavHeaderError("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;

  // chunk walk; tolerates extra chunks (LIST, fact, ...)
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t len = read_u32(hdr + 4);
    const std::size_t body = pos + 8;
    if (body + len > bytes.size()) throw WavHeaderError("chunk overruns file");
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (len < 16) throw WavHeaderError("fmt chunk too short");
      const unsigned char* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw WavHeaderError("missing fmt chunk");
  if (data == nullptr) throw WavHeaderError("missing data chunk");
  if (channels == 0 || rate == 0) throw WavHeaderError("degenerate fmt fields");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) throw WavEncodingError("unsupported wav encoding (want PCM16 or float32)");

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = data_len / frame_bytes;

  AudioBuffer out(static_cast<int>(rate), channels, frames);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + f * frame_bytes + c * bytes_per_sample;
      double v;
      if (pcm16) {
        const std::int16_t raw = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        v = static_cast<double>(raw) / 32768.0;
      } else {
        float fv;
        std::memcpy(&fv, p, 4);
        v = static_cast<double>(fv);
      }
      out.channel(c)[f] = v;
    }
  }
  return out;
}

void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path, WavDepth depth) {
  if (buffer.empty()) throw InvalidArgument("refusing to write empty buffer");
  if (path.empty()) throw IoError("empty output path");

  const std::size_t channels = buffer.channel_count();
  const std::size_t frames = buffer.frame_count();
  const std::uint16_t bits = depth == WavDepth::pcm16 ? 16 : 32;
  const std::uint16_t fmt = depth == WavDepth::pcm16 ? kFormatPcm : kFormatFloat;
  const std::uint32_t byte_rate =
      static_cast<std::uint32_t>(buffer.sample_rate()) * static_cast<std::uint32_t>(channels) * bits / 8;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_len = static_cast<std::uint32_t>(frames * channels * bits / 8);

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  put_u32(out, 36 + data_len);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, fmt);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate()));
  put_u32(out, byte_rate);
  put_u16(out, block_align);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_len);

  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = buffer.channel(c)[f];
      if (depth == WavDepth::pcm16) {
        double scaled = std::round(v * 32768.0);
        scaled = std::clamp(scaled, -32768.0, 32767.0);
        const auto raw = static_cast<std::int16_t>(scaled);
        put_u16(out, static_cast<std::uint16_t>(raw));
      } else {
        const float fv = static_cast<float>(v);
        char b[4];
        std::memcpy(b, &fv, 4);
        out.append(b, 4);
      }
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write: " + path.string());
}

std::uint64_t wav_file_size(const AudioBuffer& buffer, WavDepth depth) {
  const std::uint64_t bytes = depth == WavDepth::pcm16 ? 2 : 4;
  return 44 + bytes * buffer.frame_count() * buffer.channel_count();
}

}  // namespace wakegate
