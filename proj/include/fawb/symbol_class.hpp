#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "fawb/error.hpp"

namespace fawb {

/// A set of byte values, one bit per value in 0..=255.
///
/// Ordering is the numeric order of the 256-bit integer whose bit `b` is set
/// when byte `b` is a member (byte 255 is the most significant bit). The
/// 64-digit hex literal produced by to_hex() is that integer written
/// big-endian, so comparing hex literals as strings gives the same order.
class SymbolClass {
 public:
  constexpr SymbolClass() = default;

  static constexpr SymbolClass single(std::uint8_t b) {
    SymbolClass c;
    c.insert(b);
    return c;
  }

  static constexpr SymbolClass range(std::uint8_t lo, std::uint8_t hi) {
    SymbolClass c;
    for (unsigned b = lo; b <= hi; ++b) c.insert(static_cast<std::uint8_t>(b));
    return c;
  }

  static constexpr SymbolClass all() {
    SymbolClass c;
    c.words_ = {~0ULL, ~0ULL, ~0ULL, ~0ULL};
    return c;
  }

  constexpr bool contains(std::uint8_t b) const { return (words_[b >> 6] >> (b & 63)) & 1ULL; }
  constexpr void insert(std::uint8_t b) { words_[b >> 6] |= 1ULL << (b & 63); }
  constexpr void erase(std::uint8_t b) { words_[b >> 6] &= ~(1ULL << (b & 63)); }

  constexpr bool empty() const { return (words_[0] | words_[1] | words_[2] | words_[3]) == 0; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  constexpr bool intersects(const SymbolClass& o) const { return !(*this & o).empty(); }

  /// Smallest member; only meaningful when non-empty.
  std::uint8_t first() const {
    for (unsigned i = 0; i < 4; ++i)
      if (words_[i]) return static_cast<std::uint8_t>(i * 64 + std::countr_zero(words_[i]));
    return 0;
  }

  template <class F>
  void for_each(F&& f) const {
    for (unsigned i = 0; i < 4; ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        const unsigned bit = static_cast<unsigned>(std::countr_zero(w));
        f(static_cast<std::uint8_t>(i * 64 + bit));
        w &= w - 1;
      }
    }
  }

  constexpr SymbolClass operator|(const SymbolClass& o) const {
    SymbolClass r;
    for (int i = 0; i < 4; ++i) r.words_[i] = words_[i] | o.words_[i];
    return r;
  }
  constexpr SymbolClass operator&(const SymbolClass& o) const {
    SymbolClass r;
    for (int i = 0; i < 4; ++i) r.words_[i] = words_[i] & o.words_[i];
    return r;
  }
  constexpr SymbolClass operator~() const {
    SymbolClass r;
    for (int i = 0; i < 4; ++i) r.words_[i] = ~words_[i];
    return r;
  }
  constexpr SymbolClass& operator|=(const SymbolClass& o) { return *this = *this | o; }
  constexpr SymbolClass& operator&=(const SymbolClass& o) { return *this = *this & o; }

  constexpr bool operator==(const SymbolClass&) const = default;
  constexpr std::strong_ordering operator<=>(const SymbolClass& o) const {
    for (int i = 3; i >= 0; --i)
      if (words_[i] != o.words_[i]) return words_[i] <=> o.words_[i];
    return std::strong_ordering::equal;
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (int i = 3; i >= 0; --i)
      for (int nib = 15; nib >= 0; --nib) out.push_back(digits[(words_[i] >> (nib * 4)) & 0xF]);
    return out;
  }

  static SymbolClass from_hex(std::string_view hex) {
    if (hex.size() != 64) throw ParseError("class literal length", hex.size());
    SymbolClass c;
    for (std::size_t k = 0; k < 64; ++k) {
      const int v = hex_value(hex[k]);
      if (v < 0) throw ParseError("invalid hex digit in class literal", k);
      const std::size_t nibble = 63 - k;
      c.words_[nibble / 16] |= static_cast<std::uint64_t>(v) << ((nibble % 16) * 4);
    }
    return c;
  }

  /// Human-readable character-set text in regex syntax: a single (escaped)
  /// character, `.` for the full alphabet, or a bracket expression.
  std::string to_string() const;

  /// Parses text produced by to_string() (and any equivalent spelling).
  static SymbolClass parse(std::string_view text);

  static constexpr int hex_value(char ch) {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    return -1;
  }

 private:
  std::array<std::uint64_t, 4> words_{};
};

struct SymbolClassHash {
  std::size_t operator()(const SymbolClass& c) const { return c.hash(); }
};

namespace detail {

inline SymbolClass digit_class() { return SymbolClass::range('0', '9'); }
inline SymbolClass word_class() {
  return SymbolClass::range('a', 'z') | SymbolClass::range('A', 'Z') | digit_class() | SymbolClass::single('_');
}
inline SymbolClass space_class() {
  SymbolClass c;
  for (char ch : std::string_view(" \t\n\r\f\v")) c.insert(static_cast<std::uint8_t>(ch));
  return c;
}

/// Result of reading one escape sequence: either one byte or a shorthand class.
struct Escape {
  SymbolClass cls;
  bool single = true;
};

/// Reads an escape whose backslash sits at text[pos]; advances pos past it.
inline Escape parse_escape(std::string_view text, std::size_t& pos) {
  const std::size_t at = pos;
  ++pos;
  if (pos >= text.size()) throw ParseError("dangling escape", at);
  const char ch = text[pos++];
  auto one = [](char c) { return Escape{SymbolClass::single(static_cast<std::uint8_t>(c)), true}; };
  switch (ch) {
    case 'n': return one('\n');
    case 't': return one('\t');
    case 'r': return one('\r');
    case 'f': return one('\f');
    case 'v': return one('\v');
    case '0': return one('\0');
    case 'd': return {digit_class(), false};
    case 'D': return {~digit_class(), false};
    case 'w': return {word_class(), false};
    case 'W': return {~word_class(), false};
    case 's': return {space_class(), false};
    case 'S': return {~space_class(), false};
    case 'x': {
      if (pos + 2 > text.size()) throw ParseError("truncated \\x escape", at);
      const int hi = SymbolClass::hex_value(text[pos]);
      const int lo = SymbolClass::hex_value(text[pos + 1]);
      if (hi < 0 || lo < 0) throw ParseError("invalid \\x escape", at);
      pos += 2;
      return {SymbolClass::single(static_cast<std::uint8_t>(hi * 16 + lo)), true};
    }
    default:
      if ((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '1' && ch <= '9'))
        throw ParseError(std::string("unsupported escape \\") + ch, at);
      return one(ch);
  }
}

/// Reads a bracket expression whose '[' sits at text[pos]; advances pos past ']'.
inline SymbolClass parse_bracket(std::string_view text, std::size_t& pos) {
  const std::size_t open = pos;
  ++pos;
  bool negate = false;
  if (pos < text.size() && text[pos] == '^') {
    negate = true;
    ++pos;
  }
  SymbolClass cls;
  auto read_item = [&](Escape& out) {
    if (text[pos] == '\\') {
      out = parse_escape(text, pos);
    } else {
      out = {SymbolClass::single(static_cast<std::uint8_t>(text[pos])), true};
      ++pos;
    }
  };
  while (true) {
    if (pos >= text.size()) throw ParseError("unterminated character class", open);
    if (text[pos] == ']') {
      ++pos;
      break;
    }
    const std::size_t item_at = pos;
    Escape lo;
    read_item(lo);
    if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] != ']') {
      ++pos;
      Escape hi;
      read_item(hi);
      if (!lo.single || !hi.single) throw ParseError("shorthand class used as range endpoint", item_at);
      const std::uint8_t a = lo.cls.first();
      const std::uint8_t b = hi.cls.first();
      if (a > b) throw ParseError("reversed range in character class", item_at);
      cls |= SymbolClass::range(a, b);
    } else {
      cls |= lo.cls;
    }
  }
  if (negate) cls = ~cls;
  if (cls.empty()) throw ParseError("empty symbol class", open);
  return cls;
}

inline bool is_printable(std::uint8_t b) { return b >= 0x21 && b <= 0x7e; }

inline void append_hex_escape(std::string& out, std::uint8_t b) {
  static constexpr char digits[] = "0123456789abcdef";
  out += "\\x";
  out.push_back(digits[b >> 4]);
  out.push_back(digits[b & 15]);
}

inline void append_bracket_char(std::string& out, std::uint8_t b) {
  if (!is_printable(b)) {
    append_hex_escape(out, b);
    return;
  }
  const char ch = static_cast<char>(b);
  if (ch == '\\' || ch == ']' || ch == '[' || ch == '^' || ch == '-') out.push_back('\\');
  out.push_back(ch);
}

inline void append_literal_char(std::string& out, std::uint8_t b) {
  if (!is_printable(b)) {
    append_hex_escape(out, b);
    return;
  }
  const char ch = static_cast<char>(b);
  if (std::string_view("\\.[](){}*+?|^$").find(ch) != std::string_view::npos) out.push_back('\\');
  out.push_back(ch);
}

inline void append_ranges(std::string& out, const SymbolClass& c) {
  unsigned b = 0;
  while (b < 256) {
    if (!c.contains(static_cast<std::uint8_t>(b))) {
      ++b;
      continue;
    }
    unsigned e = b;
    while (e + 1 < 256 && c.contains(static_cast<std::uint8_t>(e + 1))) ++e;
    append_bracket_char(out, static_cast<std::uint8_t>(b));
    if (e >= b + 2) out.push_back('-');
    if (e >= b + 1) append_bracket_char(out, static_cast<std::uint8_t>(e));
    b = e + 1;
  }
}

}  // namespace detail

inline std::string SymbolClass::to_string() const {
  const std::size_t n = count();
  std::string out;
  if (n == 256) return ".";
  if (n == 1) {
    detail::append_literal_char(out, first());
    return out;
  }
  out.push_back('[');
  if (n > 128) {
    out.push_back('^');
    detail::append_ranges(out, ~*this);
  } else {
    detail::append_ranges(out, *this);
  }
  out.push_back(']');
  return out;
}

inline SymbolClass SymbolClass::parse(std::string_view text) {
  if (text.empty()) throw ParseError("empty symbol class", 0);
  std::size_t pos = 0;
  SymbolClass cls;
  if (text == ".") return all();
  if (text[0] == '[') {
    cls = detail::parse_bracket(text, pos);
  } else if (text[0] == '\\') {
    cls = detail::parse_escape(text, pos).cls;
  } else {
    cls = single(static_cast<std::uint8_t>(text[0]));
    pos = 1;
  }
  if (pos != text.size()) throw ParseError("trailing characters in symbol class", pos);
  return cls;
}

}  // namespace fawb
