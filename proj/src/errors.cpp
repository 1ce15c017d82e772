// SPDX-License-Identifier: Apache-2.0
#include "tod/errors.hpp"

#include <utility>

namespace tod {

ParseError::ParseError(const std::string& what, std::size_t byte_offset)
    : Error(what + " (at byte " + std::to_string(byte_offset) + ")"),
      byte_offset_(byte_offset) {}

IoError::IoError(const std::string& what, std::string path)
    : Error(what + ": " + path), path_(std::move(path)) {}

}  // namespace tod
