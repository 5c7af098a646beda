#pragma once

#include "wakegate/stft.hpp"

namespace wakegate {

// Late-reverberation suppression by delayed linear prediction per frequency
// bin: the tail at frame t is predicted from frames [t-delay-order+1, t-delay]
// and subtracted. Runs `iterations` passes with variance reweighting so loud
// direct-path frames do not dominate the fit. Frames without enough history
// pass through unchanged.
Spectrogram dereverberate(const Spectrogram& spec, std::size_t delay = 2, std::size_t order = 10,
                          int iterations = 2, double regularization = 1e-6);

}  // namespace wakegate
