#pragma once

#include <stdexcept>
#include <string>

namespace wakegate {

// Base for everything this library throws deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem trouble: missing input, unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

// The bytes were readable but do not parse: corrupt headers, bad schema,
// unknown config keys, malformed scripts.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A caller violated a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// WAV decode failures keep their own kinds so callers can tell a missing
// file from a file we refuse to decode.
class WavHeaderError : public FormatError {
 public:
  using FormatError::FormatError;
};

class WavEncodingError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace wakegate
