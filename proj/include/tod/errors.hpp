// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tod {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A box with non-finite coordinates or non-positive width/height.
class InvalidBox : public Error {
 public:
  using Error::Error;
};

/// A scalar or configuration parameter outside its domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Inputs that are individually valid but inconsistent with each other.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset);
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Well-formed JSON that violates the annotation/detection schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace tod
