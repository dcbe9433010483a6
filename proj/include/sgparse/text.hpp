#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace sgparse {

using Tokens = std::vector<std::string>;

inline bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Lowercases, splits on whitespace and strips leading/trailing ASCII
// punctuation from each piece. Internal punctuation ("well-lit") survives.
inline Tokens tokenize(std::string_view sentence) {
  Tokens out;
  std::string piece;
  auto flush = [&] {
    std::size_t b = 0;
    std::size_t e = piece.size();
    while (b < e && is_ascii_punct(piece[b])) ++b;
    while (e > b && is_ascii_punct(piece[e - 1])) --e;
    if (e > b) out.emplace_back(piece.substr(b, e - b));
    piece.clear();
  };
  for (char c : sentence) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      piece.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return out;
}

inline std::string join(const Tokens& words, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

// Canonical form of a node label: the tokenizer's output re-joined with
// single spaces.
inline std::string normalize_label(std::string_view label) {
  return join(tokenize(label));
}

inline std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace sgparse
