#include "wakegate/scene_io.hpp"

#include <cmath>

#include "wakegate/errors.hpp"
#include "wakegate/rng.hpp"
#include "wakegate/synth.hpp"

namespace wakegate {

namespace {

double get_or(const Json& j, const char* key, double dflt) {
  return j.contains(key) ? j.at(key).get<double>() : dflt;
}

std::uint64_t get_or_u64(const Json& j, const char* key, std::uint64_t dflt) {
  return j.contains(key) ? j.at(key).get<std::uint64_t>() : dflt;
}

std::vector<double> seeded_echo_path(std::size_t taps, std::uint64_t seed, double level_db) {
  Rng rng(seed);
  std::vector<double> h(taps);
  double e = 0.0;
  for (std::size_t k = 0; k < taps; ++k) {
    h[k] = rng.normal() * std::exp(-4.0 * static_cast<double>(k) / static_cast<double>(taps));
    e += h[k] * h[k];
  }
  const double g = amplitude_of_db(level_db) / std::sqrt(std::max(e, 1e-30));
  for (auto& v : h) v *= g;
  return h;
}

ArrayGeometry parse_geometry(const Json& j) {
  require_keys(j, {"kind", "mics", "radius_m", "speed_of_sound", "positions"}, "geometry");
  const std::string kind = j.value("kind", "circular");
  ArrayGeometry g;
  if (kind == "circular") {
    g = ArrayGeometry::circular(static_cast<std::size_t>(j.value("mics", 4)),
                                get_or(j, "radius_m", 0.032));
  } else if (kind == "explicit") {
    if (!j.contains("positions")) throw FormatError("explicit geometry needs positions");
    for (const auto& p : j.at("positions"))
      g.mic_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  } else {
    throw FormatError("unknown geometry kind: " + kind);
  }
  g.speed_of_sound = get_or(j, "speed_of_sound", 343.0);
  g.validate();
  return g;
}

}  // namespace

AudioBuffer resolve_signal(const Json& spec, const std::filesystem::path& base_dir) {
  require_keys(spec,
               {"kind", "freq_hz", "duration_s", "amplitude", "phase", "rms_db", "seed", "path",
                "word_seed", "tempo", "pitch_scale", "variant_seed", "band_shift_hz"},
               "signal");
  const std::string kind = spec.value("kind", "");
  if (kind == "sine") {
    return mono_buffer(make_sine(spec.at("freq_hz").get<double>(),
                                 spec.at("duration_s").get<double>(), kCanonicalRate,
                                 get_or(spec, "amplitude", 0.5), get_or(spec, "phase", 0.0)));
  }
  if (kind == "noise") {
    return mono_buffer(make_white_noise(spec.at("duration_s").get<double>(), kCanonicalRate,
                                        get_or_u64(spec, "seed", 0),
                                        amplitude_of_db(get_or(spec, "rms_db", -20.0))));
  }
  if (kind == "speech") {
    return mono_buffer(make_speech_like(spec.at("duration_s").get<double>(), kCanonicalRate,
                                        get_or_u64(spec, "seed", 0),
                                        get_or(spec, "amplitude", 0.5)));
  }
  if (kind == "word") {
    WordSpec w;
    w.word_seed = get_or_u64(spec, "word_seed", 1);
    w.duration_s = get_or(spec, "duration_s", 0.45);
    w.tempo = get_or(spec, "tempo", 1.0);
    w.pitch_scale = get_or(spec, "pitch_scale", 1.0);
    w.variant_seed = get_or_u64(spec, "variant_seed", 0);
    w.amplitude = get_or(spec, "amplitude", 0.5);
    w.band_shift_hz = get_or(spec, "band_shift_hz", 0.0);
    return mono_buffer(make_word(w, kCanonicalRate));
  }
  if (kind == "wav") {
    const std::filesystem::path p = spec.at("path").get<std::string>();
    AudioBuffer b = read_wav(p.is_absolute() ? p : base_dir / p);
    if (b.sample_rate() != kCanonicalRate)
      throw FormatError("wav signal must be at 16000 Hz (resampling is out of scope)");
    if (b.channel_count() != 1) throw FormatError("wav signal must be mono");
    return b;
  }
  throw FormatError("unknown signal kind: '" + kind + "'");
}

LoadedScene parse_scene(const Json& doc, const std::filesystem::path& base_dir) {
  require_keys(doc,
               {"schema_version", "seed", "noise_level_db", "t60_s", "max_distance_m", "geometry",
                "sources", "echo"},
               "scene");
  if (doc.value("schema_version", 0) != 1) throw FormatError("scene: unsupported schema_version");

  LoadedScene out;
  out.scene.seed = get_or_u64(doc, "seed", 0);
  out.scene.t60_s = get_or(doc, "t60_s", 0.0);
  out.scene.max_distance_m = get_or(doc, "max_distance_m", 5.0);
  if (doc.contains("noise_level_db")) out.scene.noise_level_db = doc.at("noise_level_db").get<double>();
  out.geometry =
      doc.contains("geometry") ? parse_geometry(doc.at("geometry")) : ArrayGeometry::circular();

  if (doc.contains("sources")) {
    for (const auto& s : doc.at("sources")) {
      require_keys(s, {"azimuth_deg", "distance_m", "level_db", "signal", "tags"}, "source");
      SourceSpec src;
      src.azimuth_deg = s.at("azimuth_deg").get<double>();
      src.distance_m = get_or(s, "distance_m", 1.0);
      src.level_db = get_or(s, "level_db", 0.0);
      if (s.contains("tags"))
        for (const auto& t : s.at("tags")) src.tags.push_back(t.get<std::string>());
      src.signal = resolve_signal(s.at("signal"), base_dir);
      out.scene.sources.push_back(std::move(src));
    }
  }

  if (doc.contains("echo")) {
    const auto& e = doc.at("echo");
    require_keys(e, {"reference", "path"}, "echo");
    EchoSpec echo;
    echo.reference = resolve_signal(e.at("reference"), base_dir);
    const auto& p = e.at("path");
    require_keys(p, {"kind", "taps", "seed", "level_db", "values"}, "echo path");
    const std::string kind = p.value("kind", "seeded");
    if (kind == "seeded") {
      echo.path = seeded_echo_path(static_cast<std::size_t>(p.value("taps", 64)),
                                   get_or_u64(p, "seed", 1), get_or(p, "level_db", -6.0));
    } else if (kind == "explicit") {
      for (const auto& v : p.at("values")) echo.path.push_back(v.get<double>());
    } else {
      throw FormatError("unknown echo path kind: " + kind);
    }
    out.scene.echo = std::move(echo);
  }

  return out;
}

LoadedScene load_scene(const std::filesystem::path& path) {
  return parse_scene(load_json(path), path.has_parent_path() ? path.parent_path() : ".");
}

Json truth_to_json(const SceneTruth& truth) {
  Json j;
  j["schema_version"] = 1;
  j["seed"] = truth.seed;
  j["normalization_gain"] = truth.normalization_gain;
  j["sources"] = Json::array();
  for (const auto& s : truth.sources) {
    Json js;
    js["azimuth_deg"] = s.azimuth_deg;
    js["delays_s"] = s.delays_s;
    js["delay_samples_int"] = s.delay_samples_int;
    js["delay_samples_frac"] = s.delay_samples_frac;
    js["tags"] = s.tags;
    j["sources"].push_back(std::move(js));
  }
  return j;
}

}  // namespace wakegate
