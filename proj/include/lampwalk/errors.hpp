#pragma once

#include <stdexcept>
#include <string>

namespace lampwalk {

// Invalid user-supplied configuration or arguments. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A size/memory guard tripped (ball too large, instance beyond solver caps).
// CLI maps this to exit code 3.
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lampwalk
