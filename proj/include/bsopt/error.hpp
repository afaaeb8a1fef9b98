#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsopt {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid pricing input (non-positive or non-finite S0, K, T; sigma <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Mismatched lengths, gaps or overlaps in a partition, malformed containers.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Unsupported configuration values (lane width, worker count, budget).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Allocation failure. Carries the number of bytes requested.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t bytes_requested)
      : Error(what), bytes_requested_(bytes_requested) {}

  std::size_t bytes_requested() const noexcept { return bytes_requested_; }

 private:
  std::size_t bytes_requested_;
};

// Malformed input file. line is 1-based for text formats; for binary input it
// holds the byte offset instead.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A batch that parsed fine but contains unpriceable elements.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bsopt
