#pragma once

#include <stdexcept>
#include <string>

namespace cubeperc {

/// Dimension outside the range an operation supports.
class DimensionError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// Vertex index outside [0, 2^d) or of the wrong parity.
class VertexError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// Exhaustive enumeration requested beyond its documented dimension limit.
class InfeasibleError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Fugacity at or below sqrt(2) - 1, where no critical probability exists.
class FugacityError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Operation defined only for a subset of parameters (e.g. lambda = 1 only).
class UnsupportedError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace cubeperc
