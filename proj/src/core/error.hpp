#pragma once

#include <stdexcept>
#include <string>

namespace uwvo {

enum class ErrorCode {
  InvalidArgument,
  ShapeMismatch,
  DegenerateGeometry,
  CheiralityFailure,
  ParseError,
  IoError,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what)
      : Error(ErrorCode::InvalidArgument, what) {}
};

class ShapeMismatchError : public Error {
 public:
  explicit ShapeMismatchError(const std::string& what)
      : Error(ErrorCode::ShapeMismatch, what) {}
};

class DegenerateGeometryError : public Error {
 public:
  explicit DegenerateGeometryError(const std::string& what)
      : Error(ErrorCode::DegenerateGeometry, what) {}
};

class CheiralityError : public Error {
 public:
  explicit CheiralityError(const std::string& what)
      : Error(ErrorCode::CheiralityFailure, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCode::ParseError, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::IoError, what) {}
};

}  // namespace uwvo
