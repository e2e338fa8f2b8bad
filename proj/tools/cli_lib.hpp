#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace robann {
namespace cli {

// Flat view of the config file: "section.key" -> raw string value.
// Top-level keys (before any [section]) are stored under their own name.
struct ExperimentConfig {
  std::string kind;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  std::uint64_t get_int(const std::string& key, std::uint64_t fallback) const;
};

struct ConfigError {
  std::string message;
};

// Parses the nested key/value text format; rejects unknown sections/keys
// (the offending key is named in the error) and malformed lines.
ExperimentConfig parse_config(const std::string& text);

// exit codes: 0 ok, 1 experiment failure, 2 config error
int run_cli(const std::vector<std::string>& args, std::string& out,
            std::string& err);

}  // namespace cli
}  // namespace robann
