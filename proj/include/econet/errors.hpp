#pragma once

#include <stdexcept>
#include <string>

namespace econet {

// Error categories map onto CLI exit codes: validation -> 2,
// numerical failure -> 3, I/O -> 4.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace econet
