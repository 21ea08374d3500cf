#pragma once

#include <stdexcept>
#include <string>

namespace gaugekit {

/// Raised for contract violations and malformed input anywhere in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gaugekit
