#include "topotrail/error.hpp"

namespace topotrail {

ParseError::ParseError(std::size_t line, const std::string& what)
    : ValidationError("line " + std::to_string(line) + ": " + what),
      line_(line) {}

}  // namespace topotrail
