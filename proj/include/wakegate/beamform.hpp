#pragma once

#include "wakegate/audio.hpp"
#include "wakegate/scene.hpp"

namespace wakegate {

// Delay-and-sum: advances each mic by its plane-wave delay for the target
// azimuth (windowed-sinc alignment) and averages. A coherent source at the
// steered azimuth passes at unity gain; independent noise drops by the
// channel count.
AudioBuffer beamform_das(const AudioBuffer& mics, const ArrayGeometry& geometry,
                         double azimuth_deg, int frac_taps = 31);

}  // namespace wakegate
