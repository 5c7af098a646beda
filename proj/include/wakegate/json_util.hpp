#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>

#include <json.hpp>

namespace wakegate {

using Json = nlohmann::json;

// Loads a JSON document, mapping stream and parse failures onto our error
// kinds.
Json load_json(const std::filesystem::path& path);

// Rejects documents carrying keys outside the allowed set. Schema files are
// strict so a typo fails loudly instead of silently using a default.
void require_keys(const Json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context);

// Writes text through a temp file in the same directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& content);

void write_json(const std::filesystem::path& path, const Json& j, int indent = 2);

}  // namespace wakegate
