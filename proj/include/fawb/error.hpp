#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fawb {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed regex or symbol-class text. `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A subset construction materialized more states than its cap allows.
class CapExceeded : public Error {
 public:
  explicit CapExceeded(std::size_t cap)
      : Error("determinization exceeded the state cap of " + std::to_string(cap)), cap_(cap) {}

  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// Document did not match the on-disk schema. `pointer` is a JSON pointer to
/// the offending node; `context` (usually a file name) prefixes the message.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& detail, const std::string& context = "")
      : Error((context.empty() ? "" : context + ": ") + (pointer.empty() ? "/" : pointer) + ": " + detail),
        pointer_(pointer),
        detail_(detail) {}

  const std::string& pointer() const noexcept { return pointer_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string pointer_;
  std::string detail_;
};

}  // namespace fawb
