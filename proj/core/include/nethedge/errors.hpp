#pragma once

#include <stdexcept>
#include <string>

namespace nethedge {

// Error categories map onto CLI exit codes: config 2, data 3, numerical 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nethedge
