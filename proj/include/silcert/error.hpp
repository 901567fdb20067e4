#pragma once

#include <stdexcept>
#include <string>

namespace silcert {

// Base for every error the library raises on bad input. The CLI maps all of
// these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A sample whose spread is zero: every confidence bound built on it is vacuous.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

// A value the source material does not provide (SIL2/SIL3 thresholds,
// intermediate proven-in-use hours) and that was not configured.
class NotSpecified : public Error {
 public:
  using Error::Error;
};

}  // namespace silcert
