#pragma once

#include <stdexcept>

namespace vins {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vins
