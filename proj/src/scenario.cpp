#include "wakegate/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "wakegate/errors.hpp"
#include "wakegate/rng.hpp"
#include "wakegate/scene_io.hpp"
#include "wakegate/synth.hpp"

namespace wakegate {

namespace {

constexpr double kChunkSeconds = 0.1;

struct TimedEvent {
  double t;
  int order;  // stable tiebreak: audio before detections before the rest
  Event event;
};

}  // namespace

ScenarioOutcome run_scenario(const AttackScenario& scenario, const SessionConfig& config,
                             const EnrollmentDb& db, const WakeTemplate& wake,
                             const DetectorConfig& detector) {
  ScenarioOutcome out;
  out.id = scenario.id;
  out.name = scenario.name;

  double exemplar_s = 0.0;
  for (const auto& ex : wake.exemplars)
    exemplar_s = std::max(exemplar_s, static_cast<double>(ex.size()) * wake.mfcc.hop_s);

  std::vector<TimedEvent> timeline;
  bool any_wake = false;
  double horizon = 0.0;

  for (const auto& ev : scenario.events) {
    horizon = std::max(horizon, ev.t);
    switch (ev.kind) {
      case ScriptEvent::Kind::face:
        if (!ev.embedding) throw InvalidArgument("face event without embedding");
        timeline.push_back({ev.t, 2, FaceObserved{*ev.embedding, ev.t}});
        break;
      case ScriptEvent::Kind::wake:
        any_wake = true;
        timeline.push_back({ev.t, 1, WakeDetected{ev.score, ev.t}});
        break;
      case ScriptEvent::Kind::end_of_speech:
        timeline.push_back({ev.t, 2, EndOfSpeech{ev.t}});
        break;
      case ScriptEvent::Kind::tick:
        timeline.push_back({ev.t, 2, Tick{ev.t}});
        break;
      case ScriptEvent::Kind::audio: {
        if (ev.audio.channel_count() != 1) throw InvalidArgument("audio payloads must be mono");
        const auto& samples = ev.audio.channel_vec(0);
        const auto chunk = static_cast<std::size_t>(kChunkSeconds * config.sample_rate);
        Endpointer ep;
        for (std::size_t off = 0; off < samples.size(); off += chunk) {
          const std::size_t len = std::min(chunk, samples.size() - off);
          const double tc = ev.t + static_cast<double>(off) / config.sample_rate;
          std::vector<double> part(samples.begin() + static_cast<std::ptrdiff_t>(off),
                                   samples.begin() + static_cast<std::ptrdiff_t>(off + len));
          // chunk timestamped at its end: its samples exist once it is over
          const double t_end = tc + static_cast<double>(len) / config.sample_rate;
          timeline.push_back({t_end, 0, AudioChunk{std::move(part), t_end}});
          if (auto eos = ep.feed(std::span<const double>(samples).subspan(off, len), tc))
            timeline.push_back({*eos, 2, EndOfSpeech{*eos}});
        }
        horizon = std::max(horizon, ev.t + ev.audio.duration_s());
        // the detector hears what the session hears; a detection lands at
        // the end of the matched window
        for (const auto& det : detect_stream(ev.audio, wake, config.wake_threshold, detector)) {
          any_wake = true;
          const double td = ev.t + det.time_s + exemplar_s;
          timeline.push_back({td, 1, WakeDetected{det.score, td}});
        }
        break;
      }
    }
  }
  timeline.push_back({horizon + 1.0, 3, Tick{horizon + 1.0}});

  std::stable_sort(timeline.begin(), timeline.end(), [](const TimedEvent& a, const TimedEvent& b) {
    return a.t < b.t || (a.t == b.t && a.order < b.order);
  });

  Session session(config, &db);
  std::size_t blocked = 0;
  for (const auto& te : timeline) {
    const auto actions = session.handle(te.event);
    for (const auto& a : actions)
      if (a.kind == Action::Kind::wake_blocked) ++blocked;
  }

  out.allowed = session.ever_streamed();
  out.blocked_attempts = blocked;
  out.trace = session.audit();
  if (!out.allowed) out.blocked_by = any_wake ? "gate" : "detector";
  return out;
}

SuiteAssets::SuiteAssets(std::uint64_t seed) : embedder(mix_seed(seed, 0xe3b)), word_seed(mix_seed(seed, 0x30d) % 1000 + 1) {
  Rng rng(mix_seed(seed, 0xa55e7));

  // owner: one base face, three slightly different shots of it
  std::vector<double> base(FaceImage::kPixels);
  for (auto& p : base) p = rng.uniform();
  std::vector<FaceImage> shots;
  for (int i = 0; i < 3; ++i) {
    FaceImage img;
    img.source_id = "owner-" + std::to_string(i);
    img.pixels = base;
    for (auto& p : img.pixels) p = std::clamp(p + 0.01 * rng.normal(), 0.0, 1.0);
    shots.push_back(std::move(img));
  }
  db.created_at = 0;
  enroll(db, "owner", shots, embedder);
  enrolled_face = db.entries.at("owner").front();

  FaceImage stranger;
  stranger.source_id = "stranger";
  stranger.pixels.resize(FaceImage::kPixels);
  for (auto& p : stranger.pixels) p = rng.uniform();
  unknown_face = embedder.embed(stranger);

  // three enrollment takes of the wake word
  std::vector<AudioBuffer> takes;
  for (int v = 0; v < 3; ++v) {
    WordSpec w;
    w.word_seed = word_seed;
    w.variant_seed = static_cast<std::uint64_t>(v);
    w.duration_s = 0.5;
    takes.push_back(mono_buffer(make_word(w, kCanonicalRate)));
  }
  wake = enroll_template("wake", takes);
}

namespace {

AudioBuffer word_audio(const SuiteAssets& a, std::uint64_t variant, double tempo, double pitch,
                       double band_shift = 0.0) {
  WordSpec w;
  w.word_seed = a.word_seed;
  w.variant_seed = variant;
  w.duration_s = 0.5;
  w.tempo = tempo;
  w.pitch_scale = pitch;
  w.band_shift_hz = band_shift;
  return mono_buffer(make_word(w, kCanonicalRate));
}

AudioBuffer with_lead_silence(const AudioBuffer& b, double lead_s, double tail_s) {
  const auto lead = static_cast<std::size_t>(lead_s * kCanonicalRate);
  const auto tail = static_cast<std::size_t>(tail_s * kCanonicalRate);
  std::vector<double> out(lead, 0.0);
  out.insert(out.end(), b.channel(0).begin(), b.channel(0).end());
  out.insert(out.end(), tail, 0.0);
  return mono_buffer(std::move(out));
}

AudioBuffer concat(const std::vector<AudioBuffer>& parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.channel(0).begin(), p.channel(0).end());
  return mono_buffer(std::move(out));
}

}  // namespace

std::vector<AttackScenario> builtin_scenarios(const SuiteAssets& a) {
  std::vector<AttackScenario> scenarios;

  {
    AttackScenario s;
    s.id = "a";
    s.name = "curious_child";
    s.description = "an unenrolled child speaks the wake word and orders things";
    s.events.push_back({ScriptEvent::Kind::face, 0.5, a.unknown_face, 0.0, {}});
    s.events.push_back(
        {ScriptEvent::Kind::audio, 1.0, std::nullopt, 0.0, with_lead_silence(word_audio(a, 9, 1.05, 1.25), 0.2, 0.6)});
    scenarios.push_back(std::move(s));
  }
  {
    AttackScenario s;
    s.id = "b";
    s.name = "ultrasonic_neighbor";
    s.description = "wake word injected in the inaudible top band";
    s.expect_allowed_gate_off = false;  // the detector itself never matches it
    s.events.push_back(
        {ScriptEvent::Kind::audio, 1.0, std::nullopt, 0.0, with_lead_silence(word_audio(a, 3, 1.0, 1.0, 6000.0), 0.2, 0.6)});
    scenarios.push_back(std::move(s));
  }
  {
    AttackScenario s;
    s.id = "c";
    s.name = "parrot";
    s.description = "a pet parrot mimics the owner's wake word";
    s.events.push_back(
        {ScriptEvent::Kind::audio, 1.0, std::nullopt, 0.0, with_lead_silence(word_audio(a, 17, 1.1, 1.3), 0.2, 0.6)});
    scenarios.push_back(std::move(s));
  }
  {
    AttackScenario s;
    s.id = "d";
    s.name = "talking_television";
    s.description = "a program on the television speaks the wake word";
    AudioBuffer program = concat({mono_buffer(make_speech_like(1.2, kCanonicalRate, 77, 0.4)),
                                  word_audio(a, 5, 1.0, 1.0),
                                  mono_buffer(make_speech_like(1.0, kCanonicalRate, 78, 0.4))});
    s.events.push_back({ScriptEvent::Kind::audio, 0.5, std::nullopt, 0.0, std::move(program)});
    scenarios.push_back(std::move(s));
  }
  {
    AttackScenario s;
    s.id = "e";
    s.name = "physical_access";
    s.description = "a visitor with physical access tries to query the speaker";
    s.events.push_back({ScriptEvent::Kind::face, 0.3, a.unknown_face, 0.0, {}});
    s.events.push_back(
        {ScriptEvent::Kind::audio, 1.0, std::nullopt, 0.0, with_lead_silence(word_audio(a, 11, 0.95, 1.0), 0.2, 0.6)});
    scenarios.push_back(std::move(s));
  }
  {
    AttackScenario s;
    s.id = "f";
    s.name = "voice_replay";
    s.description = "a recording of the owner's own wake word is replayed";
    // bit-exact enrollment take: the strongest possible voice-only spoof
    s.events.push_back(
        {ScriptEvent::Kind::audio, 1.0, std::nullopt, 0.0, with_lead_silence(word_audio(a, 0, 1.0, 1.0), 0.2, 0.6)});
    scenarios.push_back(std::move(s));
  }
  {
    AttackScenario s;
    s.id = "g";
    s.name = "garbled_commands";
    s.description = "adversarial audio, garbled to humans, trips the wake engine";
    // stipulate the engine fired; the garble itself is just noise
    s.events.push_back({ScriptEvent::Kind::audio, 0.5, std::nullopt, 0.0,
                        mono_buffer(make_white_noise(0.8, kCanonicalRate, 99, 0.1))});
    s.events.push_back({ScriptEvent::Kind::wake, 1.5, std::nullopt, 0.9, {}});
    scenarios.push_back(std::move(s));
  }

  return scenarios;
}

SuiteReport run_attack_suite(const std::vector<AttackScenario>& scenarios,
                             const SessionConfig& gate_on_config,
                             const SessionConfig& gate_off_config, const EnrollmentDb& db,
                             const WakeTemplate& wake, const DetectorConfig& detector) {
  if (scenarios.size() < 7) throw InvalidArgument("attack suite expects all seven scenarios");

  SuiteReport report;
  bool ok = true;
  for (const auto& sc : scenarios) {
    ScenarioOutcome on = run_scenario(sc, gate_on_config, db, wake, detector);
    ScenarioOutcome off = run_scenario(sc, gate_off_config, db, wake, detector);
    if (!on.allowed) ++report.blocked_with_gate;
    if (off.allowed) ++report.allowed_without_gate;
    if (on.allowed == sc.expect_blocked_gate_on) ok = false;
    if (off.allowed != sc.expect_allowed_gate_off) ok = false;
    report.gate_on.push_back(std::move(on));
    report.gate_off.push_back(std::move(off));
  }
  report.expectations_met = ok;
  return report;
}

Json report_to_json(const SuiteReport& report, const std::vector<AttackScenario>& scenarios) {
  Json j;
  j["schema_version"] = 1;
  j["generated_at"] = report.generated_at;
  j["scenarios"] = Json::array();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    Json s;
    s["id"] = scenarios[i].id;
    s["name"] = scenarios[i].name;
    s["description"] = scenarios[i].description;
    s["expected"] = {{"gate_on", scenarios[i].expect_blocked_gate_on ? "blocked" : "allowed"},
                     {"gate_off", scenarios[i].expect_allowed_gate_off ? "allowed" : "blocked"}};
    auto outcome = [](const ScenarioOutcome& o) {
      Json r;
      r["outcome"] = o.allowed ? "allowed" : "blocked";
      if (!o.allowed) r["blocked_by"] = o.blocked_by;
      r["blocked_attempts"] = o.blocked_attempts;
      return r;
    };
    s["gate_on"] = outcome(report.gate_on[i]);
    s["gate_off"] = outcome(report.gate_off[i]);
    j["scenarios"].push_back(std::move(s));
  }
  j["summary"] = {{"blocked_with_gate", report.blocked_with_gate},
                  {"allowed_without_gate", report.allowed_without_gate},
                  {"scenario_count", scenarios.size()},
                  {"expectations_met", report.expectations_met}};
  return j;
}

AttackScenario load_scenario(const std::filesystem::path& path, const SuiteAssets& assets) {
  const Json j = load_json(path);
  require_keys(j,
               {"schema_version", "id", "name", "description", "expect_blocked_gate_on",
                "expect_allowed_gate_off", "events"},
               "scenario");
  if (j.value("schema_version", 0) != 1) throw FormatError("scenario: unsupported schema_version");

  AttackScenario s;
  s.id = j.at("id").get<std::string>();
  s.name = j.value("name", s.id);
  s.description = j.value("description", "");
  s.expect_blocked_gate_on = j.value("expect_blocked_gate_on", true);
  s.expect_allowed_gate_off = j.value("expect_allowed_gate_off", true);

  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  if (!j.contains("events")) throw FormatError("scenario has no events");
  for (const auto& e : j.at("events")) {
    require_keys(e, {"t", "kind", "image", "embedding", "face", "wav", "signal", "score"},
                 "scenario event");
    ScriptEvent ev;
    ev.t = e.at("t").get<double>();
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "face") {
      ev.kind = ScriptEvent::Kind::face;
      if (e.contains("image")) {
        const std::filesystem::path p = e.at("image").get<std::string>();
        ev.embedding = assets.embedder.embed(read_pgm(p.is_absolute() ? p : base / p));
      } else if (e.contains("embedding")) {
        FaceEmbedding emb;
        const auto vals = e.at("embedding").get<std::vector<double>>();
        if (vals.size() != FaceEmbedding::kDim) throw FormatError("embedding must have 128 values");
        std::copy(vals.begin(), vals.end(), emb.v.begin());
        ev.embedding = emb;
      } else {
        const std::string tag = e.value("face", "");
        if (tag == "enrolled")
          ev.embedding = assets.enrolled_face;
        else if (tag == "unknown")
          ev.embedding = assets.unknown_face;
        else
          throw FormatError("face event needs image, embedding, or face: enrolled|unknown");
      }
    } else if (kind == "wake") {
      ev.kind = ScriptEvent::Kind::wake;
      ev.score = e.value("score", 1.0);
    } else if (kind == "audio") {
      ev.kind = ScriptEvent::Kind::audio;
      if (e.contains("wav")) {
        const std::filesystem::path p = e.at("wav").get<std::string>();
        ev.audio = read_wav(p.is_absolute() ? p : base / p);
        if (ev.audio.sample_rate() != kCanonicalRate)
          throw FormatError("scenario audio must be at 16000 Hz");
      } else if (e.contains("signal")) {
        ev.audio = resolve_signal(e.at("signal"), base);
      } else {
        throw FormatError("audio event needs wav or signal");
      }
    } else if (kind == "end_of_speech") {
      ev.kind = ScriptEvent::Kind::end_of_speech;
    } else if (kind == "tick") {
      ev.kind = ScriptEvent::Kind::tick;
    } else {
      throw FormatError("unknown scenario event kind: '" + kind + "'");
    }
    s.events.push_back(std::move(ev));
  }
  return s;
}

}  // namespace wakegate
