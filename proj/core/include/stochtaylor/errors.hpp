#pragma once

#include <stdexcept>
#include <string>

namespace stochtaylor {

// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorKind {
  Argument = 2,
  Planning = 3,
  BlowUp = 4,
  Io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::Argument, what) {}
};

// Raised when an evaluation point lies outside the domain of a function.
class DomainError : public ArgumentError {
 public:
  explicit DomainError(const std::string& what) : ArgumentError(what) {}
};

class PlanningError : public Error {
 public:
  PlanningError(const std::string& family, const std::string& what)
      : Error(ErrorKind::Planning, what), family_(family) {}
  const std::string& family() const noexcept { return family_; }

 private:
  std::string family_;
};

class BlowUpError : public Error {
 public:
  BlowUpError(long step, const std::string& what) : Error(ErrorKind::BlowUp, what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class VersionError : public IoError {
 public:
  explicit VersionError(const std::string& what) : IoError(what) {}
};

class ChecksumError : public IoError {
 public:
  explicit ChecksumError(const std::string& what) : IoError(what) {}
};

}  // namespace stochtaylor
