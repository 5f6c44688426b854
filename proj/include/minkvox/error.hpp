#pragma once

#include <stdexcept>
#include <string>

namespace minkvox {

/// Bad caller input: invalid dimensions, parameters or shapes.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent volume files and other I/O failures.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical post-condition was violated (e.g. filter output out of range).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The image has no interface, so normalized tensors are undefined.
class DegenerateImage : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace minkvox
