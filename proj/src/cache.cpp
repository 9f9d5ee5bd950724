#include "phaseforge/cache.hpp"

#include "phaseforge/errors.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <unistd.h>

namespace phaseforge {

namespace {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace

std::string cache_format_version() { return "phaseforge-cache/1"; }

ResultCache::ResultCache(std::filesystem::path root) : root_(std::move(root)) {}

ResultCache ResultCache::from_env() {
  if (const char* env = std::getenv("PHASEFORGE_CACHE")) {
    return ResultCache(std::filesystem::path(env));
  }
  std::filesystem::path base;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME")) {
    base = xdg;
  } else if (const char* home = std::getenv("HOME")) {
    base = std::filesystem::path(home) / ".cache";
  } else {
    base = std::filesystem::temp_directory_path();
  }
  return ResultCache(base / "phaseforge");
}

std::filesystem::path ResultCache::entry_path(const std::string& key) const {
  return root_ / (fnv1a_hex(cache_format_version() + "\n" + key) + ".json");
}

std::optional<std::string> ResultCache::lookup(const std::string& key) const {
  const auto path = entry_path(key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // corrupt entry: miss
  }
  if (!j.is_object() || !j.contains("version") || !j.contains("key") || !j.contains("payload")) {
    return std::nullopt;
  }
  if (j.at("version").get<std::string>() != cache_format_version()) return std::nullopt;
  if (j.at("key").get<std::string>() != key) return std::nullopt;  // hash collision: miss
  return j.at("payload").get<std::string>();
}

void ResultCache::store(const std::string& key, const std::string& payload) const {
  std::filesystem::create_directories(root_);
  nlohmann::ordered_json j;
  j["version"] = cache_format_version();
  j["key"] = key;
  j["payload"] = payload;
  const auto path = entry_path(key);
  const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cache: cannot write " + tmp);
    out << j.dump();
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace phaseforge
