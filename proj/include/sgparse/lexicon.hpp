#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "sgparse/errors.hpp"
#include "sgparse/text.hpp"

namespace sgparse {

// Symmetric, case-insensitive synonym table. Every word is its own synonym
// even when it never appears in the table.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  void add(std::string_view a, std::string_view b) {
    auto x = lower(a);
    auto y = lower(b);
    if (x.empty() || y.empty() || x == y) return;
    table_[x].insert(y);
    table_[y].insert(x);
  }

  bool synonyms(std::string_view a, std::string_view b) const {
    auto x = lower(a);
    auto y = lower(b);
    if (x == y) return true;
    auto it = table_.find(x);
    return it != table_.end() && it->second.contains(y);
  }

  // Synonyms of `word` other than itself, sorted.
  std::set<std::string> lookup(std::string_view word) const {
    auto it = table_.find(lower(word));
    return it == table_.end() ? std::set<std::string>{} : it->second;
  }

  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }

  // Format: `word<TAB>syn1,syn2,...` per line; `#` starts a comment line.
  static SynonymLexicon parse(std::istream& in) {
    SynonymLexicon lex;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      const auto head = trim(std::string_view(line).substr(0, tab));
      for (const auto& syn : split(std::string_view(line).substr(tab + 1), ',')) {
        lex.add(head, trim(syn));
      }
    }
    return lex;
  }

  static SynonymLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read lexicon " + path);
    return parse(in);
  }

 private:
  static std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  std::map<std::string, std::set<std::string>> table_;
};

// Per-word synonymy between two label strings: same word count, every
// position equal or synonymous.
inline bool labels_compatible(std::string_view a, std::string_view b, const SynonymLexicon& lexicon) {
  if (a == b) return true;
  const auto wa = tokenize(a);
  const auto wb = tokenize(b);
  if (wa.size() != wb.size()) return false;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    if (!lexicon.synonyms(wa[i], wb[i])) return false;
  }
  return true;
}

}  // namespace sgparse
