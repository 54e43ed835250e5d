#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bitext {

// Minimal UTF-8 iteration: enough to count code points and split text into
// per-code-point strings. Invalid lead bytes are treated as single-byte
// symbols instead of being rejected; corpora in the wild contain them.

inline std::size_t utf8_seq_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // continuation or invalid byte: consume as-is
}

// Decodes the code point starting at s[i] and advances i past it.
inline std::uint32_t utf8_decode(std::string_view s, std::size_t& i) {
  unsigned char lead = static_cast<unsigned char>(s[i]);
  std::size_t len = utf8_seq_len(lead);
  if (i + len > s.size()) len = 1;
  std::uint32_t cp = 0;
  switch (len) {
    case 1: cp = lead; break;
    case 2: cp = lead & 0x1F; break;
    case 3: cp = lead & 0x0F; break;
    default: cp = lead & 0x07; break;
  }
  for (std::size_t k = 1; k < len; ++k) {
    unsigned char c = static_cast<unsigned char>(s[i + k]);
    if ((c >> 6) != 0x2) { len = 1; cp = lead; break; }
    cp = (cp << 6) | (c & 0x3F);
  }
  i += len;
  return cp;
}

// One string per code point, preserving the original bytes.
inline std::vector<std::string> utf8_split(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t start = i;
    utf8_decode(s, i);
    out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace bitext
