#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

/// Input outside an operation's mathematical domain.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// A numerical procedure (quadrature, integrator, fit) did not reach its
/// tolerance. The message carries the worst-point diagnostics.
class ConvergenceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace dicke
