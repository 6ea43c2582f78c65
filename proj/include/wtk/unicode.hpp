// unicode.hpp
//
// All offsets in the toolkit count Unicode scalar values. Text is held as
// std::u32string internally and converted to UTF-8 only at I/O boundaries.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "wtk/error.hpp"

namespace wtk {

using Text = std::u32string;
using TextView = std::u32string_view;

inline bool is_scalar_value(char32_t c) { return c <= 0x10FFFF && !(c >= 0xD800 && c <= 0xDFFF); }

/// Strict decoder: rejects overlong forms, surrogates and truncated sequences.
inline Text utf8_decode(std::string_view bytes) {
  Text out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  auto fail = [&](const char* why) {
    throw Error(ErrorCode::InvalidUtf8, std::string(why) + " at byte " + std::to_string(i));
  };
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
      fail("invalid lead byte");
    }
    if (i + len > n) fail("truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) fail("invalid continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min) fail("overlong encoding");
    if (!is_scalar_value(cp)) fail("not a scalar value");
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline std::string utf8_encode(TextView text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (!is_scalar_value(c)) throw Error(ErrorCode::InvalidUtf8, "cannot encode non-scalar value");
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

/// Unicode White_Space property.
constexpr bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000;
}

constexpr bool is_ascii_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }

/// Characters that make a token a word. ASCII letters and digits, and any
/// non-ASCII scalar outside the common punctuation and symbol blocks.
constexpr bool is_word_char(char32_t c) {
  if (c < 0x80) return is_ascii_letter(c) || (c >= U'0' && c <= U'9');
  if (is_space(c)) return false;
  if (c >= 0x80 && c <= 0xBF) return c == 0xAA || c == 0xB2 || c == 0xB3 || c == 0xB5 || c == 0xB9 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows, math operators
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK symbols and punctuation
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if (c >= 0xFF01 && c <= 0xFF0F) return false;
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;  // emoji and pictographs
  return true;
}

inline Text from_utf8(std::string_view s) { return utf8_decode(s); }
inline std::string to_utf8(TextView t) { return utf8_encode(t); }

}  // namespace wtk
