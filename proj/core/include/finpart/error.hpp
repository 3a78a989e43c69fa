#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace finpart {

using Complex = std::complex<double>;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: wrong dimensions, missing windows, bad
// degrees, non-tame forms handed to the residue map, and so on.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not deliver a trustworthy value.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Evaluation requested at a pole of a meromorphic function. The residue is
// carried along so callers can report it.
class PoleError : public NumericalFailure {
 public:
  PoleError(double location, Complex residue, const std::string& what)
      : NumericalFailure(what), location_(location), residue_(residue) {}

  double location() const { return location_; }
  Complex residue() const { return residue_; }

 private:
  double location_;
  Complex residue_;
};

}  // namespace finpart
