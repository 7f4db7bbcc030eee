#ifndef COORDLAB_ERROR_HPP
#define COORDLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace coordlab {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration or malformed input files.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// A pipeline stage could not produce its artifact.
struct StageError : Error {
  explicit StageError(const std::string& msg) : Error(msg) {}
};

}  // namespace coordlab

#endif
