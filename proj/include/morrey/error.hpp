#pragma once

#include <stdexcept>
#include <string>

namespace morrey {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: mismatched lattices, bad sizes, nonnegativity misuse.
struct InvalidArgument : Error {
  using Error::Error;
};

/// An exponent (alpha, beta, p, p0, q, q0, ...) outside its admissible range.
struct InvalidExponent : Error {
  using Error::Error;
};

/// Ancestor requested at a finer level than the cube itself.
struct InvalidAncestry : Error {
  using Error::Error;
};

/// Point lies outside the coarsest cube of a level window.
struct OutOfWindow : Error {
  using Error::Error;
};

/// Query below the resolution at which a function or measure is known.
struct SubResolution : Error {
  using Error::Error;
};

/// Instance too large for a brute-force routine.
struct CostGuard : Error {
  using Error::Error;
};

}  // namespace morrey
