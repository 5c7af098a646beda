#include "wakegate/json_util.hpp"

#include <fstream>

#include "wakegate/errors.hpp"

namespace wakegate {

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void require_keys(const Json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!obj.is_object()) throw FormatError(context + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw FormatError(context + ": unknown key '" + key + "'");
  }
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.empty()) throw IoError("empty output path");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw IoError("short write: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const Json& j, int indent) {
  atomic_write(path, j.dump(indent) + "\n");
}

}  // namespace wakegate
