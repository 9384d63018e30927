#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace omplab {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched or out-of-range dimensions / indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A column subset is numerically rank deficient. Carries the offending
// support so callers can report which columns collided.
class IllConditionedError : public Error {
 public:
  IllConditionedError(std::string msg, std::vector<std::size_t> support)
      : Error(std::move(msg)), support(std::move(support)) {}

  std::vector<std::size_t> support;
};

// An exhaustive subset enumeration would exceed the configured cap.
class CapExceededError : public Error {
 public:
  CapExceededError(std::string msg, std::uint64_t subset_count, std::uint64_t cap)
      : Error(std::move(msg)), subset_count(subset_count), cap(cap) {}

  std::uint64_t subset_count;
  std::uint64_t cap;
};

// File reading/writing failure; message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

// Bad command-line arguments or malformed user input.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace omplab
