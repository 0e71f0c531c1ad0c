#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smoothforge {

/// Failure categories. Each maps to one CLI exit code.
enum class ErrorKind {
  user,        // bad formula, bad data, bad flags (exit 2)
  io,          // unreadable or unwritable files (exit 3)
  capability,  // model outside what a stage supports (exit 4)
  internal,    // invariant violated; a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Formula syntax/semantic error positioned at a byte offset into the source text.
class FormulaError : public Error {
 public:
  FormulaError(std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

int exit_code(ErrorKind kind) noexcept;

}  // namespace smoothforge
