#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bykov/model.hpp"

namespace bykov::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  std::string key;
  std::string default_value;  // empty: unset unless given
  std::string help;
};

const std::vector<KeySpec>& known_keys();
std::string keys_help();

class RunConfig {
 public:
  RunConfig();

  // key=value lines, '#' starts a comment. Unknown keys throw ConfigError.
  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& origin = "<text>");
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;  // non-empty value
  bool was_set(const std::string& key) const { return explicit_.count(key) != 0; }
  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Eigenvalue data, honoring the delta/K_omega and a shortcuts.
  ModelParams model() const;

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> explicit_;
};

}  // namespace bykov::cli
