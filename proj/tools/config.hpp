#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hmfx/io.hpp"

namespace hmfx::cli {

/// Flat `key = value` text with `[section]` headers; keys are stored as
/// "section.key". Lists are comma separated. Lookups fall back to defaults.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::string& source = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  const std::string& text() const { return text_; }
  bool has(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

  /// Replaces or appends an entry; used by --set and by sweep children.
  void set(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  /// Rejects keys outside the known set.
  void validate(const std::vector<std::string>& known) const;
  Json to_json() const;

 private:
  const std::string* find(const std::string& key) const;

  std::string text_;
  std::string source_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace hmfx::cli
