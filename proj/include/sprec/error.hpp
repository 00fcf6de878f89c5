#pragma once

#include <stdexcept>
#include <string>

namespace sprec {

/// Malformed or unusable input data (rating files, CSV tables).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented domain invariant.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Model file with a wrong magic string, unknown version, or truncated body.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The objective produced NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, std::size_t rating_index)
      : std::runtime_error(what), rating_index_(rating_index) {}
  std::size_t rating_index() const noexcept { return rating_index_; }

 private:
  std::size_t rating_index_;
};

}  // namespace sprec
