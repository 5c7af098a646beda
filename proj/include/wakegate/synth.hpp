#pragma once

#include <cstdint>
#include <vector>

#include "wakegate/audio.hpp"

namespace wakegate {

std::vector<double> make_sine(double freq_hz, double duration_s, int sample_rate,
                              double amplitude = 1.0, double phase = 0.0);

// Seeded white noise scaled to the requested RMS.
std::vector<double> make_white_noise(double duration_s, int sample_rate, std::uint64_t seed,
                                     double rms);

// Speech-shaped test signal: pitched harmonics through slowly wandering
// formant resonances, gated by a syllabic envelope. Nonstationary enough to
// exercise noise tracking and dereverberation the way speech would.
std::vector<double> make_speech_like(double duration_s, int sample_rate, std::uint64_t seed,
                                     double amplitude = 0.5);

// A synthetic spoken "word". word_seed selects the identity (syllable count,
// formant targets, pitch); tempo/pitch jitter produce same-word variants the
// way repeated utterances would differ. band_shift_hz moves the whole word
// into a high band (content confined to [band_shift_hz, Nyquist)).
struct WordSpec {
  std::uint64_t word_seed = 1;
  double duration_s = 0.45;
  double tempo = 1.0;        // > 1 speaks faster
  double pitch_scale = 1.0;  // multiplies the pitch contour
  std::uint64_t variant_seed = 0;
  double amplitude = 0.5;
  double band_shift_hz = 0.0;
};

std::vector<double> make_word(const WordSpec& spec, int sample_rate);

AudioBuffer mono_buffer(std::vector<double> samples, int sample_rate = kCanonicalRate);

// Root-mean-square of a signal.
double rms(std::span<const double> x);

// dBFS of an RMS value (0 dBFS == 1.0).
double db_of(double amplitude);
double amplitude_of_db(double db);

}  // namespace wakegate
