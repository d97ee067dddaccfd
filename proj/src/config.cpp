#include "lambar/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lambar/error.hpp"

namespace lambar {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

RunConfig RunConfig::parse_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::config,
           "config line " + std::to_string(lineno) + " is not key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      fail(ErrorKind::config,
           "config line " + std::to_string(lineno) + " has an empty key");
    if (!cfg.entries_.emplace(key, value).second)
      fail(ErrorKind::config, "duplicate config key " + key);
  }
  return cfg;
}

bool RunConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::string RunConfig::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    fail(ErrorKind::config, "missing config key " + key);
  return it->second;
}

std::string RunConfig::get(const std::string& key,
                           const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string s = get(key);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    fail(ErrorKind::config, "config key " + key + " is not a number: " + s);
  return v;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long RunConfig::get_int(const std::string& key) const {
  const std::string s = get(key);
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    fail(ErrorKind::config, "config key " + key + " is not an integer: " + s);
  return v;
}

long RunConfig::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

void RunConfig::restrict_keys(const std::set<std::string>& allowed) const {
  std::string bad;
  for (const auto& [key, value] : entries_) {
    if (allowed.count(key)) continue;
    if (!bad.empty()) bad += ", ";
    bad += key;
  }
  if (bad.empty()) return;
  std::string names;
  for (const auto& key : allowed) {
    if (!names.empty()) names += ", ";
    names += key;
  }
  fail(ErrorKind::config,
       "unknown config keys: " + bad + " (allowed: " + names + ")");
}

}  // namespace lambar
