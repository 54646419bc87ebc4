#pragma once

#include <stdexcept>
#include <string>

namespace pzf {

// Error categories map one-to-one onto CLI exit codes:
// ConfigError -> 2, NumericalError -> 3, PreconditionError -> 4.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

}  // namespace pzf
