#include "wakegate/session.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "wakegate/errors.hpp"
#include "wakegate/synth.hpp"

namespace wakegate {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::idle: return "IDLE";
    case Phase::authenticated: return "AUTHENTICATED";
    case Phase::streaming: return "STREAMING";
  }
  return "?";
}

double event_time(const Event& e) {
  return std::visit([](const auto& ev) { return ev.t; }, e);
}

const char* event_name(const Event& e) {
  struct Namer {
    const char* operator()(const FaceObserved&) const { return "FaceObserved"; }
    const char* operator()(const WakeDetected&) const { return "WakeDetected"; }
    const char* operator()(const AudioChunk&) const { return "AudioChunk"; }
    const char* operator()(const EndOfSpeech&) const { return "EndOfSpeech"; }
    const char* operator()(const Tick&) const { return "Tick"; }
  };
  return std::visit(Namer{}, e);
}

const char* action_name(Action::Kind k) {
  switch (k) {
    case Action::Kind::ring_green: return "ring_green";
    case Action::Kind::ring_off: return "ring_off";
    case Action::Kind::auth_granted: return "auth_granted";
    case Action::Kind::auth_denied: return "auth_denied";
    case Action::Kind::auth_expired: return "auth_expired";
    case Action::Kind::wake_blocked: return "wake_blocked";
    case Action::Kind::wake_ignored: return "wake_ignored";
    case Action::Kind::utterance_started: return "utterance_started";
    case Action::Kind::utterance_finished: return "utterance_finished";
  }
  return "?";
}

AudioBuffer assemble_utterance(const std::vector<double>& ring_buffer,
                               const std::vector<double>& live_chunks, int sample_rate) {
  std::vector<double> all;
  all.reserve(ring_buffer.size() + live_chunks.size());
  all.insert(all.end(), ring_buffer.begin(), ring_buffer.end());
  all.insert(all.end(), live_chunks.begin(), live_chunks.end());
  return AudioBuffer::from_mono(std::move(all), sample_rate);
}

namespace {

void append_ring(SessionState& s, const std::vector<double>& samples, const SessionConfig& cfg) {
  if (s.ring_capacity == 0)
    s.ring_capacity = static_cast<std::size_t>(std::lround(cfg.pre_roll_s * cfg.sample_rate));
  s.ring_buffer.insert(s.ring_buffer.end(), samples.begin(), samples.end());
  if (s.ring_buffer.size() > s.ring_capacity)
    s.ring_buffer.erase(s.ring_buffer.begin(),
                        s.ring_buffer.end() - static_cast<std::ptrdiff_t>(s.ring_capacity));
}

// Close the active utterance and fall back to the right phase.
void finish_utterance(SessionState& s, std::vector<Action>& actions, const SessionConfig& cfg,
                      double t) {
  const auto max_live =
      static_cast<std::size_t>(std::lround(cfg.max_utterance_s * cfg.sample_rate));
  if (s.live_audio.size() > max_live) s.live_audio.resize(max_live);

  Action a{Action::Kind::utterance_finished, s.authenticated_identity, t, 0.0,
           assemble_utterance(s.preroll_snapshot, s.live_audio, cfg.sample_rate),
           s.wake_t - cfg.pre_roll_s};
  actions.push_back(std::move(a));
  s.live_audio.clear();
  s.preroll_snapshot.clear();

  if (cfg.gate_enabled && s.authenticated_identity && t < s.auth_expiry) {
    s.phase = Phase::authenticated;
  } else {
    s.phase = Phase::idle;
    s.authenticated_identity.reset();
    actions.push_back({Action::Kind::ring_off, std::nullopt, t, 0.0, {}, 0.0});
  }
}

// Demote an expired authentication before the event proper is handled.
void apply_expiry(SessionState& s, std::vector<Action>& actions, double t) {
  if (s.phase == Phase::authenticated && t >= s.auth_expiry) {
    s.phase = Phase::idle;
    s.authenticated_identity.reset();
    actions.push_back({Action::Kind::auth_expired, std::nullopt, t, 0.0, {}, 0.0});
    actions.push_back({Action::Kind::ring_off, std::nullopt, t, 0.0, {}, 0.0});
  }
}

}  // namespace

StepResult step(const SessionState& state, const Event& event, const SessionConfig& config,
                const EnrollmentDb& db) {
  const double t = event_time(event);
  if (t < state.last_event_t) throw InvalidArgument("event timestamps must be non-decreasing");

  StepResult res;
  res.state = state;
  SessionState& s = res.state;
  std::vector<Action>& actions = res.actions;
  s.last_event_t = t;

  apply_expiry(s, actions, t);

  if (const auto* face = std::get_if<FaceObserved>(&event)) {
    const MatchResult m = recognize(db, face->embedding, config.face_threshold);
    const AuthEvent auth = gate_decision(m);
    if (auth.kind == AuthEvent::Kind::granted) {
      s.authenticated_identity = auth.identity;
      s.auth_expiry = t + config.auth_ttl_s;
      if (s.phase == Phase::idle) s.phase = Phase::authenticated;
      actions.push_back({Action::Kind::auth_granted, auth.identity, t, m.distance, {}, 0.0});
      actions.push_back({Action::Kind::ring_green, auth.identity, t, 0.0, {}, 0.0});
    } else {
      // an unknown face does not revoke a live authentication
      actions.push_back({Action::Kind::auth_denied, std::nullopt, t, m.distance, {}, 0.0});
    }
    return res;
  }

  if (const auto* wake = std::get_if<WakeDetected>(&event)) {
    (void)wake;
    if (s.phase == Phase::streaming) {
      actions.push_back({Action::Kind::wake_ignored, std::nullopt, t, 0.0, {}, 0.0});
      return res;
    }
    const bool authorized = !config.gate_enabled || (s.phase == Phase::authenticated &&
                                                     s.authenticated_identity && t < s.auth_expiry);
    if (!authorized) {
      actions.push_back({Action::Kind::wake_blocked, std::nullopt, t, 0.0, {}, 0.0});
      return res;
    }
    s.phase = Phase::streaming;
    s.stream_start_t = t;
    s.wake_t = t;
    s.preroll_snapshot = s.ring_buffer;
    s.live_audio.clear();
    actions.push_back({Action::Kind::utterance_started, s.authenticated_identity, t, 0.0, {},
                       t - config.pre_roll_s});
    return res;
  }

  if (const auto* chunk = std::get_if<AudioChunk>(&event)) {
    if (s.phase == Phase::streaming) {
      s.live_audio.insert(s.live_audio.end(), chunk->samples.begin(), chunk->samples.end());
      const double live_s =
          static_cast<double>(s.live_audio.size()) / static_cast<double>(config.sample_rate);
      if (live_s >= config.max_utterance_s) {
        append_ring(s, chunk->samples, config);
        finish_utterance(s, actions, config, t);
        return res;
      }
    }
    append_ring(s, chunk->samples, config);
    return res;
  }

  if (std::get_if<EndOfSpeech>(&event)) {
    if (s.phase == Phase::streaming) finish_utterance(s, actions, config, t);
    return res;
  }

  // Tick: expiry already applied above
  return res;
}

FeedbackState feedback_for(const SessionState& state, std::optional<double> doa_azimuth_deg) {
  FeedbackState f;
  const bool lit = state.phase == Phase::authenticated || state.phase == Phase::streaming;
  if (lit) f.slots.fill(FeedbackState::Color::green);
  if (doa_azimuth_deg) {
    if (*doa_azimuth_deg < 0.0 || *doa_azimuth_deg >= 360.0)
      throw InvalidArgument("azimuth must be in [0, 360)");
    f.pointer = static_cast<std::size_t>(std::lround(*doa_azimuth_deg / 30.0)) % 12;
  }
  return f;
}

std::string audit_to_jsonl(const std::vector<AuditRecord>& records) {
  std::ostringstream os;
  for (const auto& r : records) {
    nlohmann::json j;
    j["t"] = r.t;
    j["event"] = r.event;
    j["phase_before"] = phase_name(r.before);
    j["phase_after"] = phase_name(r.after);
    j["actions"] = r.actions;
    os << j.dump() << "\n";
  }
  return os.str();
}

Session::Session(SessionConfig config, const EnrollmentDb* db) : config_(config), db_(db) {
  if (config_.auth_ttl_s <= 0.0 || config_.pre_roll_s <= 0.0 || config_.max_utterance_s <= 0.0)
    throw InvalidArgument("session durations must be positive");
  if (db_ == nullptr) throw InvalidArgument("session needs an enrollment database");
}

std::vector<Action> Session::handle(const Event& event) {
  const Phase before = state_.phase;
  StepResult r = step(state_, event, config_, *db_);
  state_ = std::move(r.state);
  if (state_.phase == Phase::streaming) ever_streamed_ = true;

  AuditRecord rec;
  rec.t = event_time(event);
  rec.event = event_name(event);
  rec.before = before;
  rec.after = state_.phase;
  for (const auto& a : r.actions) rec.actions.emplace_back(action_name(a.kind));
  audit_.push_back(std::move(rec));
  return std::move(r.actions);
}

Endpointer::Endpointer(double silence_dbfs, double hang_s, int sample_rate)
    : threshold_(amplitude_of_db(silence_dbfs)), hang_s_(hang_s), rate_(sample_rate) {}

void Endpointer::reset() {
  in_speech_ = false;
  silence_run_s_ = 0.0;
  silence_start_t_ = 0.0;
}

std::optional<double> Endpointer::feed(std::span<const double> samples, double t) {
  if (samples.empty()) return std::nullopt;
  const double level = rms(samples);
  const double dur = static_cast<double>(samples.size()) / rate_;
  if (level >= threshold_) {
    in_speech_ = true;
    silence_run_s_ = 0.0;
    return std::nullopt;
  }
  if (!in_speech_) return std::nullopt;
  if (silence_run_s_ == 0.0) silence_start_t_ = t;
  silence_run_s_ += dur;
  if (silence_run_s_ >= hang_s_) {
    in_speech_ = false;
    silence_run_s_ = 0.0;
    return silence_start_t_;
  }
  return std::nullopt;
}

}  // namespace wakegate
