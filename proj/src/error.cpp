#include "smoothforge/error.hpp"

namespace smoothforge {

FormulaError::FormulaError(std::size_t offset, const std::string& message)
    : Error(ErrorKind::user, "formula error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset),
      message_(message) {}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::user: return 2;
    case ErrorKind::io: return 3;
    case ErrorKind::capability: return 4;
    case ErrorKind::internal: return 1;
  }
  return 1;
}

}  // namespace smoothforge
