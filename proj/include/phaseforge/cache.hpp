#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace phaseforge {

// Content-addressed result cache. Keys hash the canonical family JSON plus
// parameters and a format-version string; the full key is stored inside the
// entry and verified on read, so hash collisions and stale formats are
// treated as misses, never migrated.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path root);

  // PHASEFORGE_CACHE overrides the default root.
  static ResultCache from_env();

  std::optional<std::string> lookup(const std::string& key) const;
  // Atomic write-temp-then-rename.
  void store(const std::string& key, const std::string& payload) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path entry_path(const std::string& key) const;
  std::filesystem::path root_;
};

std::string cache_format_version();

}  // namespace phaseforge
