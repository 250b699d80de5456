#pragma once

#include <stdexcept>
#include <string>

namespace caddm {

// Bad or unknown configuration; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Checkpoint/architecture disagreement; carries a human-readable diff.
class ShapeMismatchError : public std::runtime_error {
 public:
  explicit ShapeMismatchError(const std::string& diff)
      : std::runtime_error("checkpoint/architecture mismatch:\n" + diff) {}
};

}  // namespace caddm
