#pragma once

#include <cstdint>
#include <filesystem>

#include "wakegate/json_util.hpp"
#include "wakegate/mfcc.hpp"
#include "wakegate/pipeline.hpp"
#include "wakegate/session.hpp"
#include "wakegate/wakeword.hpp"

namespace wakegate {

// Merged configuration for every stage, loadable from one JSON document
// with strict key checking. Every field has a default; a config file only
// overrides what it names.
struct RunConfig {
  std::uint64_t seed = 1;
  std::uint64_t embedder_seed = 1234;
  bool freeze_timestamps = false;
  DspConfig dsp;
  MfccConfig mfcc;
  DetectorConfig detector;
  SessionConfig session;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const Json& doc);
Json config_to_json(const RunConfig& config);

}  // namespace wakegate
