#ifndef RADLESION_ERRORS_HPP_
#define RADLESION_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace radlesion {

// Every error the library throws derives from Error so callers can catch the
// whole family at once; the concrete type tells which contract was broken.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated image file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// NIfTI datatype code outside the supported set.
class UnsupportedTypeError : public Error {
 public:
  explicit UnsupportedTypeError(int code)
      : Error("unsupported NIfTI datatype code " + std::to_string(code)),
        code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

/// Mask voxels that are not non-negative integers, or geometry mismatch.
class MaskError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent user configuration (e.g. unmapped label).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller-supplied data violates an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// VIP selection kept no features.
class SelectionError : public Error {
 public:
  using Error::Error;
};

/// Statistics on data without any variation.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// PLS model that explains no response variance.
class UndefinedModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace radlesion

#endif  // RADLESION_ERRORS_HPP_
