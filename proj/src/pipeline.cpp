#include "wakegate/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "wakegate/dereverb.hpp"
#include "wakegate/doa.hpp"
#include "wakegate/errors.hpp"
#include "wakegate/noise.hpp"
#include "wakegate/stft.hpp"

namespace wakegate {

AudioBuffer ChannelBundle::to_multichannel() const {
  AudioBuffer out(ch0.sample_rate(), 1, ch0.frame_count());
  std::copy(ch0.channel(0).begin(), ch0.channel(0).end(), out.channel(0).begin());
  for (const auto& r : raw) out.append_channel({r.channel(0).begin(), r.channel(0).end()});
  out.append_channel({ch5.channel(0).begin(), ch5.channel(0).end()});
  return out;
}

ChannelBundle process_pipeline(const AudioBuffer& mics, const std::optional<AudioBuffer>& echo_ref,
                               const DspConfig& config, const ArrayGeometry& geometry) {
  if (mics.channel_count() != 4) throw InvalidArgument("pipeline expects exactly 4 mic channels");
  if (mics.sample_rate() != kCanonicalRate)
    throw InvalidArgument("pipeline input not at the canonical rate");
  if (geometry.mic_count() != 4) throw InvalidArgument("pipeline geometry must have 4 mics");
  if (echo_ref) {
    if (echo_ref->channel_count() != 1) throw InvalidArgument("echo reference must be mono");
    if (echo_ref->frame_count() != mics.frame_count())
      throw InvalidArgument("echo reference length mismatch");
  }

  const std::size_t n = mics.frame_count();
  ChannelBundle bundle;

  // ch1..ch4 stay raw; AEC output feeds only the processed path
  std::array<std::vector<double>, 4> work;
  for (std::size_t m = 0; m < 4; ++m) {
    bundle.raw[m] = AudioBuffer::from_mono({mics.channel(m).begin(), mics.channel(m).end()},
                                           kCanonicalRate);
    if (echo_ref) {
      NlmsAec aec(config.aec);
      work[m] = aec.process(mics.channel(m), echo_ref->channel(0));
    } else {
      work[m].assign(mics.channel(m).begin(), mics.channel(m).end());
    }
  }
  bundle.aec_engaged = echo_ref.has_value();

  std::vector<double> mean(n, 0.0);
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t i = 0; i < n; ++i) mean[i] += mics.channel(m)[i];
  for (auto& v : mean) v *= 0.25;
  bundle.ch5 = AudioBuffer::from_mono(std::move(mean), kCanonicalRate);

  // analysis frames
  StftOptions opt;
  opt.zero_pad_short_input = true;
  std::array<Spectrogram, 4> specs;
  for (std::size_t m = 0; m < 4; ++m)
    specs[m] = stft(work[m], config.stft_window, config.stft_hop, kCanonicalRate, opt);
  const std::size_t frames = specs[0].frame_count();
  const std::size_t bins = specs[0].bins();

  // per-frame DoA from exponentially smoothed pair cross-spectra
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) pairs.emplace_back(i, j);
  std::vector<std::vector<std::complex<double>>> cross(pairs.size(),
                                                       std::vector<std::complex<double>>(bins));
  const double cs_smooth = 0.7;

  bundle.doa_track.reserve(frames);
  std::vector<double> steer_az(frames, 0.0);
  double held_az = 0.0;
  bool have_az = false;

  const double frame_rms_gate = 3.16e-5;  // -90 dBFS
  for (std::size_t f = 0; f < frames; ++f) {
    double frame_energy = 0.0;
    std::size_t frame_samples = 0;
    const std::size_t off = f * config.stft_hop;
    for (std::size_t m = 0; m < 4; ++m)
      for (std::size_t i = off; i < std::min(off + config.stft_window, n); ++i, ++frame_samples)
        frame_energy += work[m][i] * work[m][i];
    const double frame_rms = std::sqrt(frame_energy / std::max<std::size_t>(frame_samples, 1));

    DoaTrackPoint pt;
    pt.frame = f;
    if (frame_rms >= frame_rms_gate) {
      for (std::size_t p = 0; p < pairs.size(); ++p)
        for (std::size_t k = 0; k < bins; ++k) {
          const auto c =
              specs[pairs[p].first].frames[f][k] * std::conj(specs[pairs[p].second].frames[f][k]);
          cross[p][k] = cs_smooth * cross[p][k] + (1.0 - cs_smooth) * c;
        }
      const DoaResult r = steer_cross_spectra(cross, geometry, config.stft_window, kCanonicalRate,
                                              config.doa_grid_deg);
      pt.has_source = true;
      pt.azimuth_deg = r.azimuth_deg;
      pt.confidence = r.confidence;
      if (r.confidence >= config.doa_hold_confidence || !have_az) {
        held_az = r.azimuth_deg;
        have_az = true;
      }
    }
    bundle.doa_track.push_back(pt);
    steer_az[f] = held_az;
  }

  // steered delay-and-sum in the STFT domain: advance each channel by its
  // plane-wave delay via a per-bin phase ramp, then average
  Spectrogram beamformed = specs[0];
  for (std::size_t f = 0; f < frames; ++f) {
    const auto delays = delays_for_azimuth(geometry, steer_az[f]);
    for (std::size_t k = 0; k < bins; ++k) {
      std::complex<double> acc(0.0, 0.0);
      const double freq = specs[0].bin_hz(k);
      for (std::size_t m = 0; m < 4; ++m) {
        const double ang = 2.0 * M_PI * freq * delays[m];
        acc += specs[m].frames[f][k] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      beamformed.frames[f][k] = acc * 0.25;
    }
  }

  Spectrogram enhanced = std::move(beamformed);
  if (config.enable_wpe && frames > config.wpe_delay + config.wpe_order)
    enhanced = dereverberate(enhanced, config.wpe_delay, config.wpe_order, config.wpe_iterations);

  if (config.enable_noise_suppression && frames >= config.noise_seed_frames) {
    const double frames_per_s = static_cast<double>(kCanonicalRate) / config.stft_hop;
    const auto window_frames = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(config.noise_window_s * frames_per_s)));
    NoiseTracker tracker(bins, window_frames, config.noise_seed_frames);
    // causal: each frame is cleaned with the floor known at that frame
    for (std::size_t f = 0; f < frames; ++f) {
      tracker.update(enhanced.frames[f]);
      const auto& floor_mag = tracker.floor_mag();
      for (std::size_t k = 0; k < bins; ++k) {
        const double mag = std::abs(enhanced.frames[f][k]);
        if (mag <= 0.0) continue;
        const double kept = std::max(mag - config.subtraction_alpha * floor_mag[k],
                                     config.spectral_floor_beta * mag);
        enhanced.frames[f][k] *= kept / mag;
      }
    }
  }

  AudioBuffer resynth = istft(enhanced);
  std::vector<double> ch0(n, 0.0);
  const auto& rs = resynth.channel(0);
  for (std::size_t i = 0; i < std::min(n, rs.size()); ++i) ch0[i] = rs[i];
  bundle.ch0 = AudioBuffer::from_mono(std::move(ch0), kCanonicalRate);

  return bundle;
}

std::string doa_track_to_text(const std::vector<DoaTrackPoint>& track) {
  std::ostringstream os;
  os << "frame_index,azimuth_deg,confidence\n";
  for (const auto& p : track) {
    os << p.frame << ",";
    if (p.has_source) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.1f,%.4f", p.azimuth_deg, p.confidence);
      os << buf;
    } else {
      os << ",0.0000";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace wakegate
