#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hmfx/error.hpp"

namespace hmfx::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    fail(ErrorKind::Config, "config key '" + key + "': '" + s + "' is not a number");
  return v;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  RunConfig cfg;
  cfg.text_ = text;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Config, where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(ErrorKind::Config, where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorKind::Config, where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.find(full)) fail(ErrorKind::Config, where + ": duplicate key " + full);
    cfg.entries_.emplace_back(full, trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const std::string* RunConfig::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

bool RunConfig::has(const std::string& key) const { return find(key) != nullptr; }

std::string RunConfig::string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

double RunConfig::number(const std::string& key, double fallback) const {
  const auto* v = find(key);
  return v ? parse_number(key, *v) : fallback;
}

int RunConfig::integer(const std::string& key, int fallback) const {
  const double v = number(key, fallback);
  if (v != std::floor(v)) fail(ErrorKind::Config, "config key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<double> RunConfig::numbers(const std::string& key, std::vector<double> fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::istringstream in(*v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) fail(ErrorKind::Config, "config key '" + key + "' holds an empty list");
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void RunConfig::validate(const std::vector<std::string>& known) const {
  for (const auto& [k, v] : entries_)
    if (std::find(known.begin(), known.end(), k) == known.end())
      fail(ErrorKind::Config, "unknown config key '" + k + "'");
}

Json RunConfig::to_json() const {
  Json j = Json::object();
  for (const auto& [k, v] : entries_) j[k] = v;
  return j;
}

}  // namespace hmfx::cli
