#include "wakegate/noise.hpp"

#include <cmath>

#include "wakegate/errors.hpp"

namespace wakegate {

namespace {

constexpr double kPowerSmoothing = 0.85;
// min of smoothed power under-reads the mean; compensate before use
constexpr double kMinStatsBias = 1.5;

}  // namespace

NoiseTracker::NoiseTracker(std::size_t bins, std::size_t window_frames,
                           std::size_t initial_frames)
    : window_frames_(window_frames),
      initial_frames_(initial_frames),
      smoothed_power_(bins, 0.0),
      min_window_(bins),
      floor_(bins, 0.0) {
  if (bins == 0) throw InvalidArgument("noise tracker needs at least one bin");
  if (window_frames_ == 0) throw InvalidArgument("noise window must be at least one frame");
  if (initial_frames_ < 5) throw InvalidArgument("noise tracker needs >= 5 seed frames");
}

void NoiseTracker::update(std::span<const std::complex<double>> frame) {
  if (frame.size() != smoothed_power_.size()) throw InvalidArgument("noise tracker bin mismatch");
  ++count_;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const double p = std::norm(frame[k]);
    if (count_ <= initial_frames_) {
      // seed phase: plain average of the leading frames
      smoothed_power_[k] += (p - smoothed_power_[k]) / static_cast<double>(count_);
    } else {
      smoothed_power_[k] = kPowerSmoothing * smoothed_power_[k] + (1.0 - kPowerSmoothing) * p;
    }

    auto& dq = min_window_[k];
    while (!dq.empty() && dq.back().second >= smoothed_power_[k]) dq.pop_back();
    dq.emplace_back(count_, smoothed_power_[k]);
    while (!dq.empty() && dq.front().first + window_frames_ <= count_) dq.pop_front();

    const double min_p = dq.front().second;
    floor_[k] = std::sqrt(kMinStatsBias * min_p);
  }
}

NoiseEstimate estimate_noise(const Spectrogram& spec, std::size_t initial_frames,
                             double window_s) {
  if (spec.frame_count() < initial_frames)
    throw InvalidArgument("fewer frames than the seed count");
  const double frames_per_s = static_cast<double>(spec.sample_rate) / static_cast<double>(spec.hop);
  const auto window_frames =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(window_s * frames_per_s)));
  NoiseTracker tracker(spec.bins(), window_frames, initial_frames);
  for (const auto& f : spec.frames) tracker.update(f);
  return tracker.estimate();
}

Spectrogram suppress_noise(const Spectrogram& spec, const NoiseEstimate& noise, double alpha,
                           double beta) {
  if (beta <= 0.0 || beta >= 1.0) throw InvalidArgument("spectral floor beta must be in (0, 1)");
  if (alpha < 0.0) throw InvalidArgument("over-subtraction alpha must be non-negative");
  if (noise.floor_mag.size() != spec.bins()) throw InvalidArgument("noise floor bin mismatch");

  Spectrogram out = spec;
  for (auto& frame : out.frames) {
    for (std::size_t k = 0; k < frame.size(); ++k) {
      const double mag = std::abs(frame[k]);
      if (mag <= 0.0) continue;
      const double kept = std::max(mag - alpha * noise.floor_mag[k], beta * mag);
      frame[k] *= kept / mag;
    }
  }
  return out;
}

}  // namespace wakegate
