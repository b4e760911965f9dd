#pragma once

#include <stdexcept>
#include <string>

namespace gadqs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonHermitianInput : public Error {
public:
  using Error::Error;
};

class NotUnitary : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
public:
  using Error::Error;
};

class DuplicateTarget : public Error {
public:
  using Error::Error;
};

class ConfigInvalid : public Error {
public:
  using Error::Error;
};

class InvalidGene : public Error {
public:
  using Error::Error;
};

/// Raised when an exhaustive enumeration would exceed the configured cap.
/// Carries the architecture count as a decimal string.
class SearchSpaceTooLarge : public Error {
public:
  SearchSpaceTooLarge(std::string count, std::string cap)
      : Error("search space of " + count + " architectures exceeds cap " + cap),
        count_(std::move(count)) {}

  const std::string& count() const noexcept { return count_; }

private:
  std::string count_;
};

}  // namespace gadqs
