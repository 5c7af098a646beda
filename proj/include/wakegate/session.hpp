#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wakegate/audio.hpp"
#include "wakegate/face.hpp"

namespace wakegate {

struct SessionConfig {
  double auth_ttl_s = 30.0;   // how long a recognized face keeps the gate open
  double pre_roll_s = 0.5;    // audio retained from before the wake instant
  double wake_threshold = 0.15;
  double face_threshold = 0.6;
  bool gate_enabled = true;   // false reproduces a regular smart speaker
  double max_utterance_s = 8.0;
  int sample_rate = kCanonicalRate;
};

enum class Phase : std::uint8_t { idle, authenticated, streaming };

const char* phase_name(Phase p);

// Events are delivered with non-decreasing timestamps (seconds).
struct FaceObserved {
  FaceEmbedding embedding;
  double t = 0.0;
};
struct WakeDetected {
  double score = 0.0;
  double t = 0.0;
};
struct AudioChunk {
  std::vector<double> samples;
  double t = 0.0;
};
struct EndOfSpeech {
  double t = 0.0;
};
struct Tick {
  double t = 0.0;
};
using Event = std::variant<FaceObserved, WakeDetected, AudioChunk, EndOfSpeech, Tick>;

double event_time(const Event& e);
const char* event_name(const Event& e);

struct Action {
  enum class Kind : std::uint8_t {
    ring_green,
    ring_off,
    auth_granted,
    auth_denied,
    auth_expired,
    wake_blocked,    // gate closed: attempt logged, nothing streamed
    wake_ignored,    // already streaming; no barge-in
    utterance_started,
    utterance_finished,
  };
  Kind kind;
  std::optional<std::string> identity;
  double t = 0.0;
  double distance = 0.0;              // for auth decisions
  AudioBuffer utterance;              // only on utterance_finished
  double utterance_start_t = 0.0;     // wake time minus pre-roll
};

const char* action_name(Action::Kind k);

struct SessionState {
  Phase phase = Phase::idle;
  std::optional<std::string> authenticated_identity;
  double auth_expiry = -1.0;
  double last_event_t = -1.0;

  // last pre_roll_s of ch0 audio; capacity is fixed once warm
  std::vector<double> ring_buffer;
  std::size_t ring_capacity = 0;

  double stream_start_t = 0.0;
  double wake_t = 0.0;
  std::vector<double> preroll_snapshot;  // ring contents frozen at the wake instant
  std::vector<double> live_audio;
};

struct StepResult {
  SessionState state;
  std::vector<Action> actions;
};

// The transition function. Pure: same (state, event, config, db) gives the
// same result, so traces replay bit-exactly. Authentication expiry is
// evaluated lazily against each event's timestamp, not only on Tick.
StepResult step(const SessionState& state, const Event& event, const SessionConfig& config,
                const EnrollmentDb& db);

// Concatenates pre-roll and live audio into the streamed utterance.
AudioBuffer assemble_utterance(const std::vector<double>& ring_buffer,
                               const std::vector<double>& live_chunks, int sample_rate);

// Pixel ring: 12 LEDs, green while the gate is open, pointer slot derived
// from the source azimuth (30 degrees per slot).
struct FeedbackState {
  enum class Color : std::uint8_t { off, green };
  std::array<Color, 12> slots{};
  std::optional<std::size_t> pointer;  // highlighted slot
};

FeedbackState feedback_for(const SessionState& state, std::optional<double> doa_azimuth_deg);

// One line per processed event.
struct AuditRecord {
  double t = 0.0;
  std::string event;
  Phase before = Phase::idle;
  Phase after = Phase::idle;
  std::vector<std::string> actions;
};

std::string audit_to_jsonl(const std::vector<AuditRecord>& records);

// Convenience wrapper owning state, config, and the audit trail.
class Session {
 public:
  Session(SessionConfig config, const EnrollmentDb* db);

  std::vector<Action> handle(const Event& event);
  const SessionState& state() const { return state_; }
  const SessionConfig& config() const { return config_; }
  const std::vector<AuditRecord>& audit() const { return audit_; }
  bool ever_streamed() const { return ever_streamed_; }

 private:
  SessionConfig config_;
  const EnrollmentDb* db_;
  SessionState state_;
  std::vector<AuditRecord> audit_;
  bool ever_streamed_ = false;
};

// Energy endpointer: emits end-of-speech after `hang_s` of audio below
// `silence_dbfs` once speech has been heard.
class Endpointer {
 public:
  Endpointer(double silence_dbfs = -40.0, double hang_s = 0.3, int sample_rate = kCanonicalRate);

  // Feeds a chunk; returns the end-of-speech time if this chunk closed an
  // utterance.
  std::optional<double> feed(std::span<const double> samples, double t);
  void reset();

 private:
  double threshold_;
  double hang_s_;
  int rate_;
  bool in_speech_ = false;
  double silence_run_s_ = 0.0;
  double silence_start_t_ = 0.0;
};

}  // namespace wakegate
