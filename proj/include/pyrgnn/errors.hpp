#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pyrgnn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix or vector shapes that do not line up.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A value or structure that breaks a documented invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Power iteration ran out of budget; the estimate is still carried along.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double estimate, double residual)
      : Error(what), estimate_(estimate), residual_(residual) {}

  double estimate() const noexcept { return estimate_; }
  double residual() const noexcept { return residual_; }

 private:
  double estimate_;
  double residual_;
};

class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class PoolCollapse : public Error {
 public:
  using Error::Error;
};

class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

class SingularReduction : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class TooFewSamples : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; message carries file and 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// An edge that points outside the vertex range of its graph.
class IndexError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pyrgnn
