#pragma once

#include <stdexcept>
#include <string>

namespace kappa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derivative (or projection) was requested at a point where the
/// closed form is undefined, e.g. the center of a ball.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class UnsupportedGeometry : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class StatisticalPowerError : public Error {
 public:
  using Error::Error;
};

class MissingFunctional : public Error {
 public:
  using Error::Error;
};

class ClockError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kappa
