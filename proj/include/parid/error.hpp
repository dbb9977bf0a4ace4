#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace parid {

/// Argument outside the mathematical domain of an operation (alpha <= 1, t too small, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A configured resource limit (endpoint budget, enumeration path budget) would be exceeded.
class ResourceGuardError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The cumulative edge counter left the representable range at step `tau`.
class EdgeOverflowError : public std::overflow_error {
public:
  EdgeOverflowError(std::uint64_t tau, const std::string &what)
      : std::overflow_error(what), tau_(tau) {}

  std::uint64_t tau() const noexcept { return tau_; }

private:
  std::uint64_t tau_;
};

} // namespace parid
