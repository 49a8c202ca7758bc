#pragma once

#include <stdexcept>
#include <string>

namespace syngcn {

// Problems with input data or files. The CLI maps these to exit code 2,
// as opposed to usage errors (exit 1).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace syngcn
