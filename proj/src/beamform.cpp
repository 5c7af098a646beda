#include "wakegate/beamform.hpp"

#include "wakegate/errors.hpp"

namespace wakegate {

AudioBuffer beamform_das(const AudioBuffer& mics, const ArrayGeometry& geometry,
                         double azimuth_deg, int frac_taps) {
  geometry.validate();
  if (mics.channel_count() != geometry.mic_count())
    throw InvalidArgument("channel count does not match geometry");

  const auto delays = delays_for_azimuth(geometry, azimuth_deg);
  const std::size_t n = mics.frame_count();
  std::vector<double> acc(n, 0.0);
  for (std::size_t m = 0; m < mics.channel_count(); ++m) {
    const auto aligned = fractional_delay(mics.channel(m), -delays[m], mics.sample_rate(), frac_taps);
    for (std::size_t i = 0; i < n; ++i) acc[i] += aligned[i];
  }
  const double inv = 1.0 / static_cast<double>(mics.channel_count());
  for (auto& v : acc) v *= inv;
  return AudioBuffer::from_mono(std::move(acc), mics.sample_rate());
}

}  // namespace wakegate
