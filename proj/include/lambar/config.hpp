#pragma once

#include <map>
#include <set>
#include <string>

namespace lambar {

// key = value run configuration. Lines starting with # (after whitespace)
// and blank lines are ignored; inline "  # comment" tails are stripped.
// Keys are unique; a duplicate key is an error.
class RunConfig {
 public:
  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;

  // Errors unless every present key is in `allowed`, naming the offenders
  // and the allowed set.
  void restrict_keys(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace lambar
