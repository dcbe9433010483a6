#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "sgparse/alignment_result.hpp"
#include "sgparse/edge_centric.hpp"
#include "sgparse/lexicon.hpp"
#include "sgparse/scene_graph.hpp"
#include "sgparse/text.hpp"

namespace sgparse {

// Which alignment steps may fall back to synonym matching.
//   Full:   every step except the first-cycle object pass
//   AllSyn: all six steps
//   NoSyn:  none
enum class AlignMode { Full, AllSyn, NoSyn };

inline std::string_view to_string(AlignMode m) {
  switch (m) {
    case AlignMode::Full: return "full";
    case AlignMode::AllSyn: return "all-syn";
    case AlignMode::NoSyn: return "no-syn";
  }
  return "?";
}

// `start` is 1-based.
inline bool wbw_match(std::string_view label, const Tokens& tokens, int start) {
  const auto words = tokenize(label);
  if (words.empty() || start < 1) return false;
  const auto first = static_cast<std::size_t>(start - 1);
  if (first + words.size() > tokens.size()) return false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] != tokens[first + i]) return false;
  }
  return true;
}

inline bool syn_match(std::string_view label, const Tokens& tokens, int start, const SynonymLexicon& lexicon) {
  const auto words = tokenize(label);
  if (words.empty() || start < 1) return false;
  const auto first = static_cast<std::size_t>(start - 1);
  if (first + words.size() > tokens.size()) return false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!lexicon.synonyms(words[i], tokens[first + i])) return false;
  }
  return true;
}

namespace detail {

// Leftmost free span of the label's word count that matches.
inline std::optional<Span> find_span(std::string_view label, const Tokens& tokens, const AlignmentResult& result,
                                     bool use_syn, const SynonymLexicon& lexicon) {
  const int len = static_cast<int>(tokenize(label).size());
  const int n = static_cast<int>(tokens.size());
  if (len == 0) return std::nullopt;
  for (int start = 1; start + len - 1 <= n; ++start) {
    bool free = true;
    for (int t = start; t < start + len && free; ++t) free = !result.aligned_words.contains(t);
    if (!free) continue;
    const bool hit = use_syn ? syn_match(label, tokens, start, lexicon) : wbw_match(label, tokens, start);
    if (hit) return Span{start, start + len - 1};
  }
  return std::nullopt;
}

inline void align_cycle(const Tokens& tokens, const SceneGraph& graph, const SynonymLexicon& lexicon,
                        bool syn_objects, bool syn_rest, AlignmentResult& result) {
  for (std::size_t i = 0; i < graph.objects.size(); ++i) {
    const auto node = object_node(i);
    if (result.aligned(node)) continue;
    if (auto s = find_span(graph.objects[i], tokens, result, syn_objects, lexicon)) result.add(node, *s);
  }
  for (std::size_t i = 0; i < graph.attributes.size(); ++i) {
    const auto node = attribute_node(i);
    if (result.aligned(node) || !result.aligned(object_node(graph.attributes[i].object))) continue;
    if (auto s = find_span(graph.attributes[i].label, tokens, result, syn_rest, lexicon)) result.add(node, *s);
  }
  for (std::size_t i = 0; i < graph.relations.size(); ++i) {
    const auto node = relation_node(i);
    const auto& r = graph.relations[i];
    if (result.aligned(node) || !result.aligned(object_node(r.subject)) || !result.aligned(object_node(r.object))) {
      continue;
    }
    if (auto s = find_span(r.label, tokens, result, syn_rest, lexicon)) result.add(node, *s);
  }
}

}  // namespace detail

// Two-cycle sentence/graph alignment. Each cycle aligns objects, then
// attributes (object must already be aligned), then relations (both ends
// aligned). The second cycle relaxes object matching to synonyms.
inline AlignmentResult align(const Tokens& tokens, const SceneGraph& graph, const SynonymLexicon& lexicon,
                             AlignMode mode = AlignMode::Full) {
  AlignmentResult result;
  const bool any_syn = mode != AlignMode::NoSyn;
  detail::align_cycle(tokens, graph, lexicon, mode == AlignMode::AllSyn, any_syn, result);
  detail::align_cycle(tokens, graph, lexicon, any_syn, any_syn, result);
  return result;
}

inline AlignmentResult align(std::string_view sentence, const SceneGraph& graph, const SynonymLexicon& lexicon,
                             AlignMode mode = AlignMode::Full) {
  return align(tokenize(sentence), graph, lexicon, mode);
}

struct GoldDerivation {
  ArcSet arcs;
  std::set<int> reduce_set;  // tokens touched by no gold arc
};

inline GoldDerivation derive_gold(const AlignmentResult& alignment, const SceneGraph& graph, ArcRule rule,
                                  int n_tokens) {
  GoldDerivation gold{to_edge_centric(graph, alignment, rule, n_tokens), {}};
  std::set<int> touched;
  for (const auto& a : gold.arcs) {
    touched.insert(a.head);
    touched.insert(a.dependent);
  }
  for (int t = 1; t <= n_tokens; ++t) {
    if (!touched.contains(t)) gold.reduce_set.insert(t);
  }
  return gold;
}

}  // namespace sgparse
