#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brm {

// Raised for malformed serialized input. byte_offset points at the position
// in the payload where the problem was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace brm
