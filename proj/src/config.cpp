#include "wakegate/config.hpp"

#include "wakegate/errors.hpp"

namespace wakegate {

namespace {

template <typename T>
void read_into(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig parse_config(const Json& doc) {
  require_keys(doc,
               {"schema_version", "seed", "embedder_seed", "freeze_timestamps", "dsp", "mfcc",
                "detector", "session"},
               "config");
  if (doc.contains("schema_version") && doc.at("schema_version").get<int>() != 1)
    throw FormatError("config: unsupported schema_version");

  RunConfig c;
  read_into(doc, "seed", c.seed);
  read_into(doc, "embedder_seed", c.embedder_seed);
  read_into(doc, "freeze_timestamps", c.freeze_timestamps);

  if (doc.contains("dsp")) {
    const Json& d = doc.at("dsp");
    require_keys(d,
                 {"stft_window", "stft_hop", "aec_taps", "aec_step_size", "aec_regularization",
                  "subtraction_alpha", "spectral_floor_beta", "noise_window_s",
                  "noise_seed_frames", "wpe_delay", "wpe_order", "wpe_iterations", "doa_grid_deg",
                  "doa_hold_confidence", "enable_wpe", "enable_noise_suppression"},
                 "config.dsp");
    read_into(d, "stft_window", c.dsp.stft_window);
    read_into(d, "stft_hop", c.dsp.stft_hop);
    read_into(d, "aec_taps", c.dsp.aec.taps);
    read_into(d, "aec_step_size", c.dsp.aec.step_size);
    read_into(d, "aec_regularization", c.dsp.aec.regularization);
    read_into(d, "subtraction_alpha", c.dsp.subtraction_alpha);
    read_into(d, "spectral_floor_beta", c.dsp.spectral_floor_beta);
    read_into(d, "noise_window_s", c.dsp.noise_window_s);
    read_into(d, "noise_seed_frames", c.dsp.noise_seed_frames);
    read_into(d, "wpe_delay", c.dsp.wpe_delay);
    read_into(d, "wpe_order", c.dsp.wpe_order);
    read_into(d, "wpe_iterations", c.dsp.wpe_iterations);
    read_into(d, "doa_grid_deg", c.dsp.doa_grid_deg);
    read_into(d, "doa_hold_confidence", c.dsp.doa_hold_confidence);
    read_into(d, "enable_wpe", c.dsp.enable_wpe);
    read_into(d, "enable_noise_suppression", c.dsp.enable_noise_suppression);
  }

  if (doc.contains("mfcc")) {
    const Json& m = doc.at("mfcc");
    require_keys(m, {"n_coeffs", "window_s", "hop_s", "n_mels", "fmin_hz", "fmax_hz", "log_floor"},
                 "config.mfcc");
    read_into(m, "n_coeffs", c.mfcc.n_coeffs);
    read_into(m, "window_s", c.mfcc.window_s);
    read_into(m, "hop_s", c.mfcc.hop_s);
    read_into(m, "n_mels", c.mfcc.n_mels);
    read_into(m, "fmin_hz", c.mfcc.fmin_hz);
    read_into(m, "fmax_hz", c.mfcc.fmax_hz);
    read_into(m, "log_floor", c.mfcc.log_floor);
  }

  if (doc.contains("detector")) {
    const Json& d = doc.at("detector");
    require_keys(d,
                 {"position_hop_s", "window_scales", "refractory_s", "dtw_band_frac",
                  "energy_gate_dbfs"},
                 "config.detector");
    read_into(d, "position_hop_s", c.detector.position_hop_s);
    read_into(d, "window_scales", c.detector.window_scales);
    read_into(d, "refractory_s", c.detector.refractory_s);
    read_into(d, "dtw_band_frac", c.detector.dtw_band_frac);
    read_into(d, "energy_gate_dbfs", c.detector.energy_gate_dbfs);
  }

  if (doc.contains("session")) {
    const Json& s = doc.at("session");
    require_keys(s,
                 {"auth_ttl_s", "pre_roll_s", "wake_threshold", "face_threshold", "gate_enabled",
                  "max_utterance_s"},
                 "config.session");
    read_into(s, "auth_ttl_s", c.session.auth_ttl_s);
    read_into(s, "pre_roll_s", c.session.pre_roll_s);
    read_into(s, "wake_threshold", c.session.wake_threshold);
    read_into(s, "face_threshold", c.session.face_threshold);
    read_into(s, "gate_enabled", c.session.gate_enabled);
    read_into(s, "max_utterance_s", c.session.max_utterance_s);
  }

  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(load_json(path)); }

Json config_to_json(const RunConfig& c) {
  Json j;
  j["schema_version"] = 1;
  j["seed"] = c.seed;
  j["embedder_seed"] = c.embedder_seed;
  j["freeze_timestamps"] = c.freeze_timestamps;
  j["dsp"] = {{"stft_window", c.dsp.stft_window},
              {"stft_hop", c.dsp.stft_hop},
              {"aec_taps", c.dsp.aec.taps},
              {"aec_step_size", c.dsp.aec.step_size},
              {"aec_regularization", c.dsp.aec.regularization},
              {"subtraction_alpha", c.dsp.subtraction_alpha},
              {"spectral_floor_beta", c.dsp.spectral_floor_beta},
              {"noise_window_s", c.dsp.noise_window_s},
              {"noise_seed_frames", c.dsp.noise_seed_frames},
              {"wpe_delay", c.dsp.wpe_delay},
              {"wpe_order", c.dsp.wpe_order},
              {"wpe_iterations", c.dsp.wpe_iterations},
              {"doa_grid_deg", c.dsp.doa_grid_deg},
              {"doa_hold_confidence", c.dsp.doa_hold_confidence},
              {"enable_wpe", c.dsp.enable_wpe},
              {"enable_noise_suppression", c.dsp.enable_noise_suppression}};
  j["mfcc"] = {{"n_coeffs", c.mfcc.n_coeffs}, {"window_s", c.mfcc.window_s},
               {"hop_s", c.mfcc.hop_s},       {"n_mels", c.mfcc.n_mels},
               {"fmin_hz", c.mfcc.fmin_hz},   {"fmax_hz", c.mfcc.fmax_hz},
               {"log_floor", c.mfcc.log_floor}};
  j["detector"] = {{"position_hop_s", c.detector.position_hop_s},
                   {"window_scales", c.detector.window_scales},
                   {"refractory_s", c.detector.refractory_s},
                   {"dtw_band_frac", c.detector.dtw_band_frac},
                   {"energy_gate_dbfs", c.detector.energy_gate_dbfs}};
  j["session"] = {{"auth_ttl_s", c.session.auth_ttl_s},
                  {"pre_roll_s", c.session.pre_roll_s},
                  {"wake_threshold", c.session.wake_threshold},
                  {"face_threshold", c.session.face_threshold},
                  {"gate_enabled", c.session.gate_enabled},
                  {"max_utterance_s", c.session.max_utterance_s}};
  return j;
}

}  // namespace wakegate
