#pragma once

#include <stdexcept>
#include <string>

namespace scanplan {

// Base of every library error. The CLI maps BadConfig to exit code 2 and
// everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class BadConfig : public Error {
 public:
  using Error::Error;
};

class NoCorrespondences : public Error {
 public:
  using Error::Error;
};

class InsufficientAnchors : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IncompleteRun : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scanplan
