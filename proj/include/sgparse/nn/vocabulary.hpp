#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgparse/text.hpp"

namespace sgparse::nn {

// Word index with three reserved entries. Frequencies drive word dropout.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kRoot = 1;
  static constexpr int kPad = 2;

  Vocabulary() {
    for (const char* w : {"<unk>", "<root>", "<pad>"}) push(w, 0);
  }

  // Counts every token; keeps at most `max_words` regular entries, most
  // frequent first (ties alphabetical).
  static Vocabulary build(const std::vector<Tokens>& sentences, std::size_t max_words = SIZE_MAX) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& s : sentences) {
      for (const auto& w : s) ++counts[w];
    }
    std::vector<std::pair<std::string, std::uint64_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (sorted.size() > max_words) sorted.resize(max_words);
    Vocabulary v;
    for (const auto& [w, c] : sorted) v.push(w, c);
    return v;
  }

  void push(const std::string& word, std::uint64_t freq) {
    index_.emplace(word, static_cast<int>(words_.size()));
    words_.push_back(word);
    freq_.push_back(freq);
  }

  int id(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? kUnk : it->second;
  }

  std::size_t size() const { return words_.size(); }
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::uint64_t frequency(int id) const { return freq_.at(static_cast<std::size_t>(id)); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.freq_ == b.freq_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> freq_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace sgparse::nn
