#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hyperloom {

// Data/format errors surface as CLI exit code 2, numeric/capacity errors as 3.
enum class ErrorClass { data, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorClass::data, "dimension error: " + what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorClass::numeric, "domain error: " + what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorClass::data, "parse error at line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorClass::numeric, "capacity error: " + what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what) : Error(ErrorClass::data, "configuration error: " + what) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(ErrorClass::numeric, "degenerate input: " + what) {}
};

class SignatureError : public Error {
 public:
  SignatureError(const std::string& what, std::string spectrum)
      : Error(ErrorClass::numeric, "signature error: " + what + " (spectrum: " + spectrum + ")"),
        spectrum_(std::move(spectrum)) {}
  const std::string& spectrum() const noexcept { return spectrum_; }

 private:
  std::string spectrum_;
};

class ProgressError : public Error {
 public:
  explicit ProgressError(const std::string& what) : Error(ErrorClass::numeric, "no progress: " + what) {}
};

}  // namespace hyperloom
