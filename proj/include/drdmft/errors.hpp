#pragma once

#include <stdexcept>
#include <string>

namespace drdmft {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Grid construction / compatibility
class NonCommensurate : public Error {
public:
  using Error::Error;
};
class TooSmall : public Error {
public:
  using Error::Error;
};
class GridMismatch : public Error {
public:
  using Error::Error;
};

// Model evaluation
class UnknownKind : public Error {
public:
  using Error::Error;
};
class ArityMismatch : public Error {
public:
  using Error::Error;
};

// Solvers
class NoConvergence : public Error {
public:
  using Error::Error;
};
class MemoryBudgetExceeded : public Error {
public:
  using Error::Error;
};
class BasisMismatch : public Error {
public:
  using Error::Error;
};
class MuBracketFailure : public Error {
public:
  using Error::Error;
};

// Front-end
class ConfigError : public Error {
public:
  using Error::Error;
};
class ResourceError : public Error {
public:
  using Error::Error;
};

} // namespace drdmft
