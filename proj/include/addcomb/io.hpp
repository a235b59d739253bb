#pragma once

// File formats: integer files hold one nonnegative decimal integer per line
// (repeats give multiplicity); strings are UTF-8 decoded to scalar values, or
// taken byte by byte in binary mode.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "addcomb/errors.hpp"
#include "addcomb/hamming.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_parameter("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<Index> parse_integers(const std::string& text, const std::string& where) {
  std::vector<Index> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i == line.size()) continue;
    Index v = 0;
    for (; i < line.size(); ++i) {
      const char ch = line[i];
      if (ch < '0' || ch > '9') throw invalid_parameter(where + ":" + std::to_string(no) + ": expected a nonnegative integer");
      if (v > (Index{1} << 58)) throw arithmetic_overflow(where + ":" + std::to_string(no) + ": value too large");
      v = v * 10 + (ch - '0');
    }
    out.push_back(v);
  }
  return out;
}

inline MultiSet read_multiset(const std::string& path, std::optional<Index> universe = std::nullopt) {
  return MultiSet::from_values(parse_integers(read_file(path), path), universe);
}

inline IntSet read_int_set(const std::string& path) { return make_set(parse_integers(read_file(path), path)); }

// One trailing line break is dropped so that files written by editors read as expected.
inline SymbolString decode_symbols(std::string s, bool binary) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') s.pop_back();
  SymbolString out;
  if (binary) {
    for (unsigned char c : s) out.push_back(c);
    return out;
  }
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + static_cast<std::size_t>(len) > s.size()) throw invalid_parameter("invalid UTF-8 input");
    Symbol v = len == 1 ? c : c & (0x7F >> len);
    for (int j = 1; j < len; ++j) {
      const auto d = static_cast<unsigned char>(s[i + static_cast<std::size_t>(j)]);
      if ((d >> 6) != 0x2) throw invalid_parameter("invalid UTF-8 input");
      v = (v << 6) | (d & 0x3F);
    }
    out.push_back(v);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

inline SymbolString read_symbols(const std::string& path, bool binary = false) { return decode_symbols(read_file(path), binary); }

}  // namespace addcomb
