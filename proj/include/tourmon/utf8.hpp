#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tourmon::utf8 {

// UTF-8 and lightweight Unicode utilities. The classification, casing and
// normalization tables cover the scripts this toolkit actually meets in
// accommodation pages and tourist comments (Latin incl. extended ranges,
// Greek, Cyrillic, Arabic, Hebrew, CJK); they are a documented subset of
// the full Unicode property set, not a replacement for ICU.

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at byte offset i; advances i past it.
// Malformed sequences yield U+FFFD and advance one byte.
inline char32_t decode(std::string_view s, std::size_t& i) {
  unsigned char c0 = static_cast<unsigned char>(s[i]);
  if (c0 < 0x80) {
    ++i;
    return c0;
  }
  auto cont = [&](std::size_t k) {
    return i + k < s.size() &&
           (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto cb = [&](std::size_t k) {
    return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F);
  };
  if ((c0 & 0xE0) == 0xC0 && cont(1)) {
    char32_t cp = ((c0 & 0x1F) << 6) | cb(1);
    i += 2;
    return cp < 0x80 ? kReplacement : cp;
  }
  if ((c0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = ((c0 & 0x0F) << 12) | (cb(1) << 6) | cb(2);
    i += 3;
    return cp < 0x800 ? kReplacement : cp;
  }
  if ((c0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = ((c0 & 0x07) << 18) | (cb(1) << 12) | (cb(2) << 6) | cb(3);
    i += 4;
    return (cp < 0x10000 || cp > 0x10FFFF) ? kReplacement : cp;
  }
  ++i;
  return kReplacement;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_letter(char32_t c) {
  if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) return true;
  if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c <= 0xFF) return c != 0xD7 && c != 0xF7;       // Latin-1 letters
  if (c <= 0x2AF) return true;                        // Latin Ext-A/B, IPA
  if (c >= 0x370 && c <= 0x3FF) return c != 0x387;    // Greek
  if (c >= 0x400 && c <= 0x4FF) return true;          // Cyrillic
  if (c >= 0x531 && c <= 0x556) return true;          // Armenian upper
  if (c >= 0x561 && c <= 0x587) return true;          // Armenian lower
  if (c >= 0x5D0 && c <= 0x5EA) return true;          // Hebrew
  if (c >= 0x620 && c <= 0x64A) return true;          // Arabic
  if (c >= 0x671 && c <= 0x6D3) return true;          // Arabic extended
  if (c >= 0x3041 && c <= 0x3096) return true;        // Hiragana
  if (c >= 0x30A1 && c <= 0x30FA) return true;        // Katakana
  if (c >= 0x4E00 && c <= 0x9FFF) return true;        // CJK unified
  if (c >= 0xAC00 && c <= 0xD7A3) return true;        // Hangul
  return false;
}

inline bool is_combining_mark(char32_t c) { return c >= 0x300 && c <= 0x36F; }

inline char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;  // À–Þ
  if (c >= 0x100 && c <= 0x137) return (c % 2 == 0) ? c + 1 : c;
  if (c == 0x130) return 'i';  // İ
  if (c >= 0x139 && c <= 0x148) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return (c % 2 == 0) ? c + 1 : c;  // incl. Œ
  if (c == 0x178) return 0xFF;                                    // Ÿ → ÿ
  if (c >= 0x179 && c <= 0x17E) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;  // Greek
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;                // Cyrillic
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

// NFC composition for the base+combining pairs that occur in French and
// neighbouring European orthographies. Returns 0 when no precomposed form
// is mapped.
inline char32_t compose(char32_t base, char32_t mark) {
  struct Entry {
    char32_t base;
    char32_t mark;
    char32_t composed;
  };
  static constexpr Entry table[] = {
      {'a', 0x300, 0xE0}, {'a', 0x301, 0xE1}, {'a', 0x302, 0xE2},
      {'a', 0x303, 0xE3}, {'a', 0x308, 0xE4}, {'a', 0x30A, 0xE5},
      {'e', 0x300, 0xE8}, {'e', 0x301, 0xE9}, {'e', 0x302, 0xEA},
      {'e', 0x308, 0xEB}, {'i', 0x300, 0xEC}, {'i', 0x301, 0xED},
      {'i', 0x302, 0xEE}, {'i', 0x308, 0xEF}, {'o', 0x300, 0xF2},
      {'o', 0x301, 0xF3}, {'o', 0x302, 0xF4}, {'o', 0x303, 0xF5},
      {'o', 0x308, 0xF6}, {'u', 0x300, 0xF9}, {'u', 0x301, 0xFA},
      {'u', 0x302, 0xFB}, {'u', 0x308, 0xFC}, {'y', 0x301, 0xFD},
      {'y', 0x308, 0xFF}, {'c', 0x327, 0xE7}, {'c', 0x301, 0x107},
      {'c', 0x30C, 0x10D}, {'n', 0x303, 0xF1}, {'s', 0x30C, 0x161},
      {'z', 0x30C, 0x17E},
      {'A', 0x300, 0xC0}, {'A', 0x301, 0xC1}, {'A', 0x302, 0xC2},
      {'A', 0x303, 0xC3}, {'A', 0x308, 0xC4}, {'A', 0x30A, 0xC5},
      {'E', 0x300, 0xC8}, {'E', 0x301, 0xC9}, {'E', 0x302, 0xCA},
      {'E', 0x308, 0xCB}, {'I', 0x300, 0xCC}, {'I', 0x301, 0xCD},
      {'I', 0x302, 0xCE}, {'I', 0x308, 0xCF}, {'O', 0x300, 0xD2},
      {'O', 0x301, 0xD3}, {'O', 0x302, 0xD4}, {'O', 0x303, 0xD5},
      {'O', 0x308, 0xD6}, {'U', 0x300, 0xD9}, {'U', 0x301, 0xDA},
      {'U', 0x302, 0xDB}, {'U', 0x308, 0xDC}, {'Y', 0x301, 0xDD},
      {'Y', 0x308, 0x178}, {'C', 0x327, 0xC7}, {'C', 0x301, 0x106},
      {'C', 0x30C, 0x10C}, {'N', 0x303, 0xD1}, {'S', 0x30C, 0x160},
      {'Z', 0x30C, 0x17D},
  };
  for (const auto& e : table)
    if (e.base == base && e.mark == mark) return e.composed;
  return 0;
}

// Composes combining sequences (NFC for the mapped pairs); other marks are
// passed through unchanged.
inline std::string nfc(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  char32_t pending = 0;
  bool has_pending = false;
  std::size_t i = 0;
  while (i < s.size()) {
    char32_t cp = decode(s, i);
    if (has_pending && is_combining_mark(cp)) {
      char32_t comp = compose(pending, cp);
      if (comp != 0) {
        pending = comp;
        continue;
      }
    }
    if (has_pending) append(out, pending);
    pending = cp;
    has_pending = true;
  }
  if (has_pending) append(out, pending);
  return out;
}

inline std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) append(out, to_lower(decode(s, i)));
  return out;
}

inline std::string nfc_lower(std::string_view s) { return lower(nfc(s)); }

// Targeted compatibility foldings used for name normalization: common
// ligatures, fullwidth ASCII, space variants. Applied before nfc().
inline std::string compat_fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    char32_t cp = decode(s, i);
    switch (cp) {
      case 0xFB00: out += "ff"; break;
      case 0xFB01: out += "fi"; break;
      case 0xFB02: out += "fl"; break;
      case 0xFB03: out += "ffi"; break;
      case 0xFB04: out += "ffl"; break;
      case 0x00A0:
      case 0x2007:
      case 0x202F:
      case 0x2009:
      case 0x2002:
      case 0x2003: out.push_back(' '); break;
      default:
        if (cp >= 0xFF01 && cp <= 0xFF5E)
          out.push_back(static_cast<char>(cp - 0xFF01 + 0x21));
        else
          append(out, cp);
    }
  }
  return out;
}

inline bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == 0xA0 || c == 0x2009 || c == 0x202F;
}

// Collapses whitespace runs to single spaces and trims the ends.
inline std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = true;  // leading whitespace is dropped
  std::size_t i = 0;
  while (i < s.size()) {
    char32_t cp = decode(s, i);
    if (is_space(cp)) {
      in_ws = true;
    } else {
      if (in_ws && !out.empty()) out.push_back(' ');
      in_ws = false;
      append(out, cp);
    }
  }
  return out;
}

// Counts code points (token length for the 1-character drop rule).
inline std::size_t length(std::string_view s) {
  std::size_t n = 0, i = 0;
  while (i < s.size()) {
    decode(s, i);
    ++n;
  }
  return n;
}

}  // namespace tourmon::utf8
