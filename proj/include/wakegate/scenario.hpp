#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wakegate/face.hpp"
#include "wakegate/json_util.hpp"
#include "wakegate/session.hpp"
#include "wakegate/wakeword.hpp"

namespace wakegate {

// One scripted stimulus. Audio payloads are run through the wake-word
// detector and the endpointer, so a scenario only reaches the session's
// wake transition if the detector actually fires on its audio.
struct ScriptEvent {
  enum class Kind : std::uint8_t { face, wake, audio, end_of_speech, tick };
  Kind kind = Kind::tick;
  double t = 0.0;
  std::optional<FaceEmbedding> embedding;  // face
  double score = 1.0;                      // wake (pre-detected engines)
  AudioBuffer audio;                       // audio
};

struct AttackScenario {
  std::string id;  // "a".."g"
  std::string name;
  std::string description;
  std::vector<ScriptEvent> events;
  bool expect_blocked_gate_on = true;
  bool expect_allowed_gate_off = true;
};

struct ScenarioOutcome {
  std::string id;
  std::string name;
  bool allowed = false;       // true iff the session ever reached STREAMING
  std::string blocked_by;     // "gate" | "detector" when blocked
  std::size_t blocked_attempts = 0;
  std::vector<AuditRecord> trace;
};

// Replays a scenario against a fresh session.
ScenarioOutcome run_scenario(const AttackScenario& scenario, const SessionConfig& config,
                             const EnrollmentDb& db, const WakeTemplate& wake,
                             const DetectorConfig& detector = {});

// Deterministic fixture shared by the built-in scenarios: one enrolled
// owner, an unknown face, and an enrolled wake word.
struct SuiteAssets {
  Embedder embedder;
  EnrollmentDb db;
  WakeTemplate wake;
  FaceEmbedding enrolled_face;
  FaceEmbedding unknown_face;
  std::uint64_t word_seed = 0;

  explicit SuiteAssets(std::uint64_t seed);
};

// The seven voice-channel threat replays (curious child, ultrasonic,
// parrot, talking television, physical access, voice replay, garbled
// commands).
std::vector<AttackScenario> builtin_scenarios(const SuiteAssets& assets);

struct SuiteReport {
  std::vector<ScenarioOutcome> gate_on;
  std::vector<ScenarioOutcome> gate_off;
  std::size_t blocked_with_gate = 0;
  std::size_t allowed_without_gate = 0;
  bool expectations_met = false;
  std::uint64_t generated_at = 0;
};

SuiteReport run_attack_suite(const std::vector<AttackScenario>& scenarios,
                             const SessionConfig& gate_on_config,
                             const SessionConfig& gate_off_config, const EnrollmentDb& db,
                             const WakeTemplate& wake, const DetectorConfig& detector = {});

Json report_to_json(const SuiteReport& report, const std::vector<AttackScenario>& scenarios);

// Scenario script file (see FORMATS.md). Face payloads may be PGM paths,
// inline embeddings, or the tags "enrolled" / "unknown" resolved against
// the fixture; audio payloads may be WAV paths or inline synthesis specs.
AttackScenario load_scenario(const std::filesystem::path& path, const SuiteAssets& assets);

}  // namespace wakegate
