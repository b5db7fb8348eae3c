#pragma once

#include <stdexcept>
#include <string>

namespace gazkit {

// Malformed input files, headers or records.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration; the CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal mismatch between components, e.g. a dictionary and a parameter
// set built for different type vocabularies.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gazkit
