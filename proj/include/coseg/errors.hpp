#pragma once

#include <stdexcept>
#include <string>

namespace coseg {

// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// File opened but its contents do not follow the expected layout.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition (sizes, counts, ranges).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Run inputs are inconsistent: missing files, missing flow pairs, bad config keys.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace coseg
