#pragma once

#include <filesystem>

#include "wakegate/json_util.hpp"
#include "wakegate/scene.hpp"

namespace wakegate {

struct LoadedScene {
  SceneSpec scene;
  ArrayGeometry geometry;
};

// Parses a scene document (see FORMATS.md). Source signals may be inline
// synthesis specs or WAV references resolved relative to the scene file.
LoadedScene load_scene(const std::filesystem::path& path);
LoadedScene parse_scene(const Json& doc, const std::filesystem::path& base_dir);

// Resolves one signal spec ("sine" | "noise" | "speech" | "word" | "wav").
AudioBuffer resolve_signal(const Json& spec, const std::filesystem::path& base_dir);

Json truth_to_json(const SceneTruth& truth);

}  // namespace wakegate
