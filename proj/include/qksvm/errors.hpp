#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qksvm {

// Base for every error raised by the library. The CLI maps these to exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A quantum-only operation was asked for a classical kernel (or vice versa).
class WrongFamilyError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace qksvm
