#pragma once

// Text helpers shared by every module: UTF-8 aware whitespace handling, the
// deterministic tokenizer, and ASCII case folding.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace structseg::text {

namespace detail {

// Decodes one code point starting at s[pos]. Returns the byte length consumed;
// malformed sequences are reported as a single byte with cp = 0xFFFD.
inline std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  std::size_t len = 0;
  char32_t value = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    value = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    value = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    value = b0 & 0x07;
  } else {
    cp = 0xFFFD;
    return 1;
  }
  if (pos + len > s.size()) {
    cp = 0xFFFD;
    return 1;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      cp = 0xFFFD;
      return 1;
    }
    value = (value << 6) | (b & 0x3F);
  }
  cp = value;
  return len;
}

inline bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 0x21 && u <= 0x2F) || (u >= 0x3A && u <= 0x40) ||
         (u >= 0x5B && u <= 0x60) || (u >= 0x7B && u <= 0x7E);
}

}  // namespace detail

/// Unicode White_Space property (the subset that can occur in text).
constexpr bool is_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

/// Removes leading and trailing Unicode whitespace.
inline std::string_view trim(std::string_view s) {
  std::size_t begin = 0;
  while (begin < s.size()) {
    char32_t cp = 0;
    const auto n = detail::decode_utf8(s, begin, cp);
    if (!is_space(cp)) break;
    begin += n;
  }
  std::size_t end = begin;
  std::size_t pos = begin;
  while (pos < s.size()) {
    char32_t cp = 0;
    const auto n = detail::decode_utf8(s, pos, cp);
    pos += n;
    if (!is_space(cp)) end = pos;
  }
  return s.substr(begin, end - begin);
}

/// Splits on Unicode whitespace runs; never yields empty pieces.
inline std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < s.size()) {
    char32_t cp = 0;
    const auto n = detail::decode_utf8(s, pos, cp);
    if (is_space(cp)) {
      if (start != std::string_view::npos) {
        out.push_back(s.substr(start, pos - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = pos;
    }
    pos += n;
  }
  if (start != std::string_view::npos) out.push_back(s.substr(start));
  return out;
}

/// Splits `s` on every occurrence of `delim` (empty pieces are kept).
inline std::vector<std::string_view> split(std::string_view s, std::string_view delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto hit = s.find(delim, start);
    if (hit == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, hit - start));
    start = hit + delim.size();
  }
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// ASCII-only lowercasing; non-ASCII bytes pass through untouched.
inline std::string fold_case(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });
  return out;
}

/// The toolkit tokenizer: whitespace split, then leading and trailing ASCII
/// punctuation peeled off into one-character tokens ("(end)." -> "(" "end" ")" ".").
/// Case is preserved. Internal punctuation ("don't", "3.5") stays attached.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  for (auto chunk : split_whitespace(s)) {
    std::size_t lead = 0;
    while (lead < chunk.size() && detail::is_ascii_punct(chunk[lead])) ++lead;
    if (lead == chunk.size()) {
      for (char c : chunk) out.emplace_back(1, c);
      continue;
    }
    std::size_t tail = chunk.size();
    while (tail > lead && detail::is_ascii_punct(chunk[tail - 1])) --tail;
    for (std::size_t i = 0; i < lead; ++i) out.emplace_back(1, chunk[i]);
    out.emplace_back(chunk.substr(lead, tail - lead));
    for (std::size_t i = tail; i < chunk.size(); ++i) out.emplace_back(1, chunk[i]);
  }
  return out;
}

/// Tokenizer used for scoring: tokenize() followed by case folding.
inline std::vector<std::string> tokenize_folded(std::string_view s) {
  auto tokens = tokenize(s);
  for (auto& t : tokens) t = fold_case(t);
  return tokens;
}

inline bool is_punctuation_token(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(), [](char c) { return detail::is_ascii_punct(c); });
}

}  // namespace structseg::text
