#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace radarsr {

/// Invalid parameters or inconsistent configuration. Maps to the CLI usage exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the byte (or line) position of the fault.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& path, std::uint64_t offset, const std::string& what)
      : std::runtime_error(path + " @" + std::to_string(offset) + ": " + what),
        path_(path),
        offset_(offset) {}

  const std::string& path() const { return path_; }
  std::uint64_t offset() const { return offset_; }

 private:
  std::string path_;
  std::uint64_t offset_;
};

/// Failure while running a pipeline stage (divergence, non-finite values, I/O).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radarsr
