#ifndef DMDSEP_ERRORS_H_
#define DMDSEP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dmdsep {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of the operands do not agree, or a matrix is empty.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A segment has fewer than the two snapshots DMD needs.
class InsufficientFramesError : public Error {
 public:
  using Error::Error;
};

// The data carries no usable signal (e.g. an all-zero snapshot matrix).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Missing, unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

// A request the implementation deliberately does not handle (e.g. upsampling).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter value (negative threshold, zero iterations, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace dmdsep

#endif  // DMDSEP_ERRORS_H_
