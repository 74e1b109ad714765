#pragma once

#include <stdexcept>
#include <string>

namespace symsdp {

// Every failure raised by the library derives from Error. The CLI maps the
// kind onto its exit-code contract.
enum class ErrorKind {
  MalformedInput,   // unparsable file, non-bijective generator, bad fields
  ResourceLimit,    // group size or n cap exceeded
  DegenerateSample, // randomized decomposition could not separate spaces
  Invariance,       // SDP data not constant on pair orbits
  Verification,     // an algebraic identity failed its residual gate
  Shape,            // dimension mismatch
  Index,            // out-of-range index
  Domain,           // parameter outside a formula's domain
  Numeric,          // eigen solver failure
  DependentInput,   // rank deficiency in orthonormalization
  Contract,         // caller violated a precondition
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// Carries the residual that tripped a verification gate.
class VerificationError : public Error {
public:
  VerificationError(const std::string &what, double residual)
      : Error(ErrorKind::Verification, what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

// Raised by orthonormalize; index names the first vector that fell into the
// span of its predecessors.
class DependentInputError : public Error {
public:
  explicit DependentInputError(std::size_t index)
      : Error(ErrorKind::DependentInput,
              "vector " + std::to_string(index) + " is linearly dependent on its predecessors"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

} // namespace symsdp
