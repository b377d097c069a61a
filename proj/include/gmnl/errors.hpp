#pragma once

#include <stdexcept>
#include <string>

namespace gmnl {

/// Malformed or out-of-domain argument (length mismatch, bad probability, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A request whose exact evaluation would exceed a configured enumeration or
/// memory budget. The message names the budget and, where one exists, the
/// Monte Carlo fallback.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Valid input that falls outside the supported scope (asymmetric games,
/// mixed edge dimensions, ...).
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gmnl
