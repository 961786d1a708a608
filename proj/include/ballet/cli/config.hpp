#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ballet/bench/trial.hpp"
#include "ballet/errors.hpp"

namespace ballet::cli {

/// A config file problem. `key` names the offending key when there is one.
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& what, std::string key, std::size_t line)
      : InputError(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

/// Parses the experiment file format:
///
///   # comment
///   key = value            (before any section: defaults for every section)
///   [section]
///   key = value, value     (lists are comma separated; seeds accept a..b)
///
/// Each section expands to one ExperimentConfig per (objective, method)
/// pair. Required keys: objective, method, T, seeds.
std::vector<bench::ExperimentConfig> parse_config_text(
    std::string_view text, const std::string& source = "<config>");

std::vector<bench::ExperimentConfig> parse_config(const std::string& path);

/// Keys accepted by the parser, in documentation order.
const std::vector<std::string>& known_keys();

}  // namespace ballet::cli
