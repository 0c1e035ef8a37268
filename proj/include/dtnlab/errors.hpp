#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dtnlab {

// Base of every error raised by the library. Callers that only care about
// "something in dtnlab failed" catch this.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
  using Error::Error;
};

class InvalidMesh : public Error {
public:
  using Error::Error;
};

class SyntaxError : public Error {
public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class EvalDomainError : public Error {
public:
  EvalDomainError(const std::string& what, std::size_t offset)
      : Error(what + " (node at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class NonElliptic : public Error {
public:
  using Error::Error;
};

class SingularJacobian : public Error {
public:
  using Error::Error;
};

class QuadratureFailure : public Error {
public:
  using Error::Error;
};

class EmptyInterior : public Error {
public:
  using Error::Error;
};

class NearDirichletSpectrum : public Error {
public:
  NearDirichletSpectrum(const std::string& what, double lambda)
      : Error(what), lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

private:
  double lambda_;
};

class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
public:
  ConvergenceFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

// A theorem's hypothesis does not hold for the supplied configuration.
class HypothesisViolation : public Error {
public:
  using Error::Error;
};

}  // namespace dtnlab
