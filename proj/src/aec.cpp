#include "wakegate/aec.hpp"

#include <cmath>

#include "wakegate/errors.hpp"

namespace wakegate {

NlmsAec::NlmsAec(AecConfig config) : config_(config) {
  if (config_.taps == 0) throw InvalidArgument("aec needs at least one tap");
  if (config_.step_size <= 0.0 || config_.step_size >= 2.0)
    throw InvalidArgument("aec step size must be in (0, 2)");
  if (config_.regularization <= 0.0) throw InvalidArgument("aec regularization must be positive");
  weights_.assign(config_.taps, 0.0);
  history_.assign(config_.taps, 0.0);
}

void NlmsAec::reset() {
  std::fill(weights_.begin(), weights_.end(), 0.0);
  std::fill(history_.begin(), history_.end(), 0.0);
  head_ = 0;
  energy_ = 0.0;
  steps_ = 0;
}

double NlmsAec::process_sample(double mic, double reference) {
  if (!std::isfinite(mic) || !std::isfinite(reference))
    throw InvalidArgument("aec input must be finite");

  const std::size_t l = config_.taps;

  // push newest reference; head_ points at it
  head_ = (head_ + l - 1) % l;
  energy_ += reference * reference - history_[head_] * history_[head_];
  history_[head_] = reference;
  if (++steps_ % 8192 == 0) {
    // refresh the running energy so float drift cannot accumulate
    energy_ = 0.0;
    for (double h : history_) energy_ += h * h;
  }

  // weights_[k] pairs with history at age k; walk the ring in two straight runs
  const std::size_t first = l - head_;
  double estimate = 0.0;
  for (std::size_t k = 0; k < first; ++k) estimate += weights_[k] * history_[head_ + k];
  for (std::size_t k = first; k < l; ++k) estimate += weights_[k] * history_[k - first];

  const double err = mic - estimate;
  const double g = config_.step_size * err / (std::max(energy_, 0.0) + config_.regularization);
  for (std::size_t k = 0; k < first; ++k) weights_[k] += g * history_[head_ + k];
  for (std::size_t k = first; k < l; ++k) weights_[k] += g * history_[k - first];
  return err;
}

std::vector<double> NlmsAec::process(std::span<const double> mic,
                                     std::span<const double> reference) {
  if (mic.size() != reference.size()) throw InvalidArgument("aec mic/reference length mismatch");
  std::vector<double> out(mic.size());
  for (std::size_t i = 0; i < mic.size(); ++i) out[i] = process_sample(mic[i], reference[i]);
  return out;
}

AudioBuffer aec_nlms(const AudioBuffer& mic, const AudioBuffer& reference, NlmsAec& state) {
  if (mic.channel_count() != 1 || reference.channel_count() != 1)
    throw InvalidArgument("aec operates on mono buffers");
  if (mic.sample_rate() != reference.sample_rate())
    throw InvalidArgument("aec mic/reference rate mismatch");
  if (mic.frame_count() != reference.frame_count())
    throw InvalidArgument("aec mic/reference length mismatch");
  return AudioBuffer::from_mono(state.process(mic.channel(0), reference.channel(0)),
                                mic.sample_rate());
}

}  // namespace wakegate
