#pragma once

#include <stdexcept>
#include <string>

namespace ruqkit {

// Malformed or contract-violating input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad invocation or invalid configuration (CLI exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ruqkit
