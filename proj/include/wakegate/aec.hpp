#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wakegate/audio.hpp"

namespace wakegate {

struct AecConfig {
  std::size_t taps = 1024;  // 64 ms at 16 kHz
  double step_size = 0.5;   // mu in (0, 2)
  double regularization = 1e-6;
};

// Sample-by-sample NLMS echo canceller. Owns the adaptive filter state; one
// instance per mic channel, fed strictly in stream order.
class NlmsAec {
 public:
  explicit NlmsAec(AecConfig config);

  // d = mic sample, x = loudspeaker reference sample. Returns the error
  // signal (echo-reduced mic).
  double process_sample(double mic, double reference);

  // Convenience over equal-length spans.
  std::vector<double> process(std::span<const double> mic, std::span<const double> reference);

  const std::vector<double>& taps() const { return weights_; }
  const AecConfig& config() const { return config_; }
  void reset();

 private:
  AecConfig config_;
  std::vector<double> weights_;  // w[0] applies to the newest reference sample
  std::vector<double> history_;  // ring of reference samples
  std::size_t head_ = 0;
  double energy_ = 0.0;  // running ||x||^2 over the window
  std::uint64_t steps_ = 0;
};

// One-shot form: cancels `reference` leakage from `mic`, updating `state`.
AudioBuffer aec_nlms(const AudioBuffer& mic, const AudioBuffer& reference, NlmsAec& state);

}  // namespace wakegate
