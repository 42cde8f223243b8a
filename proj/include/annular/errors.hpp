#pragma once

#include <stdexcept>
#include <string>

namespace annular {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInterval : public Error {
 public:
  using Error::Error;
};

class DivisionByZeroInterval : public Error {
 public:
  DivisionByZeroInterval() : Error("interval division by an interval containing zero") {}
};

/// Argument outside the natural domain of a function or map family.
class DomainError : public Error {
 public:
  using Error::Error;
};

class TanPoleError : public DomainError {
 public:
  TanPoleError() : DomainError("tan: argument interval may contain a pole") {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class MissingRho : public Error {
 public:
  MissingRho() : Error("non-twist threshold needs the rotational difference rho") {}
};

class NoFixedPoint : public Error {
 public:
  using Error::Error;
};

class FrameError : public Error {
 public:
  using Error::Error;
};

class ComplexEigenvalues : public FrameError {
 public:
  ComplexEigenvalues() : FrameError("jacobian has complex eigenvalues") {}
};

class NearSingularFrame : public FrameError {
 public:
  using FrameError::FrameError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace annular
