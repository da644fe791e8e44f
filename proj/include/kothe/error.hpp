#pragma once

#include <stdexcept>
#include <string>

namespace kothe {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths, atom counts or block shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Parameter outside its admissible range (exponent <= 0, empty grid, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical routine could not produce a meaningful answer, e.g. the
// Luxemburg bisection failed to bracket.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A factorization that would require R to be multivalued.
class IllPosedError : public Error {
 public:
  using Error::Error;
};

}  // namespace kothe
