#pragma once

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sgparse/alignment_result.hpp"
#include "sgparse/errors.hpp"
#include "sgparse/scene_graph.hpp"
#include "sgparse/text.hpp"

namespace sgparse {

inline int span_head(const Span& s, ArcRule rule) { return rule == ArcRule::LeftArc ? s.end : s.start; }

// Converts an aligned node-centric graph into labeled arcs over the tokens.
// Unaligned nodes (and relations/attributes hanging off unaligned objects)
// contribute nothing. A token never receives a second head: the first arc
// in emission order (CONT, ATTR, SUBJ, OBJT, BEGN) wins.
inline ArcSet to_edge_centric(const SceneGraph& graph, const AlignmentResult& alignment, ArcRule rule,
                              int n_tokens) {
  std::vector<std::pair<NodeRef, Span>> spans(alignment.node_spans.begin(), alignment.node_spans.end());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i].second;
    if (s.start < 1 || s.end > n_tokens || s.start > s.end) {
      throw AlignmentConflict("span [" + std::to_string(s.start) + "," + std::to_string(s.end) + "] outside sentence");
    }
    for (std::size_t j = i + 1; j < spans.size(); ++j) {
      if (s.overlaps(spans[j].second)) {
        throw AlignmentConflict("overlapping spans [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                                "] and [" + std::to_string(spans[j].second.start) + "," +
                                std::to_string(spans[j].second.end) + "]");
      }
    }
  }

  ArcSet out(n_tokens);
  std::vector<bool> has_head(static_cast<std::size_t>(n_tokens) + 2, false);
  auto emit = [&](int head, int dep, EdgeLabel label) {
    if (has_head[static_cast<std::size_t>(dep)]) return;
    has_head[static_cast<std::size_t>(dep)] = true;
    out.insert({head, dep, label});
  };
  auto head_of = [&](const NodeRef& n) -> int {
    const Span* s = alignment.span_of(n);
    return s ? span_head(*s, rule) : 0;
  };

  for (const auto& [node, s] : alignment.node_spans) {
    for (int t = s.start; t < s.end; ++t) {
      if (rule == ArcRule::LeftArc) {
        emit(t + 1, t, EdgeLabel::Cont);
      } else {
        emit(t, t + 1, EdgeLabel::Cont);
      }
    }
  }
  for (std::size_t i = 0; i < graph.attributes.size(); ++i) {
    const int a = head_of(attribute_node(i));
    const int o = head_of(object_node(graph.attributes[i].object));
    if (a && o) emit(o, a, EdgeLabel::Attr);
  }
  for (std::size_t i = 0; i < graph.relations.size(); ++i) {
    const auto& r = graph.relations[i];
    const int rh = head_of(relation_node(i));
    const int sh = head_of(object_node(r.subject));
    const int oh = head_of(object_node(r.object));
    if (!rh || !sh || !oh) continue;
    emit(sh, rh, EdgeLabel::Subj);
    emit(rh, oh, EdgeLabel::Objt);
  }
  for (std::size_t i = 0; i < graph.objects.size(); ++i) {
    const int o = head_of(object_node(i));
    if (o) emit(n_tokens + 1, o, EdgeLabel::Begn);
  }
  return out;
}

namespace detail {

struct NodeView {
  std::vector<int> head_of_token;  // token -> phrase head (0 if none)
  std::map<int, Span> phrases;     // head -> span
};

inline std::vector<Arc> structural_conflicts(const ArcSet& arcs) {
  const int n = arcs.n_tokens();
  const int root = arcs.root();
  std::set<Arc> bad;
  std::map<int, std::vector<Arc>> by_dep;
  bool left_cont = false;
  bool right_cont = false;
  for (const auto& a : arcs) {
    const bool in_range = a.head >= 1 && a.head <= root && a.dependent >= 1 && a.dependent <= n;
    if (!in_range || ((a.label == EdgeLabel::Begn) != (a.head == root))) {
      bad.insert(a);
      continue;
    }
    if (a.label == EdgeLabel::Cont) {
      if (a.head == a.dependent + 1) {
        left_cont = true;
      } else if (a.head + 1 == a.dependent) {
        right_cont = true;
      } else {
        bad.insert(a);
      }
    }
    by_dep[a.dependent].push_back(a);
  }
  for (const auto& [dep, v] : by_dep) {
    if (v.size() > 1) bad.insert(v.begin(), v.end());
  }
  if (left_cont && right_cont) {
    for (const auto& a : arcs) {
      if (a.label == EdgeLabel::Cont) bad.insert(a);
    }
  }
  return {bad.begin(), bad.end()};
}

// Assumes structural_conflicts() came back empty.
inline NodeView collapse_phrases(const ArcSet& arcs) {
  const int n = arcs.n_tokens();
  NodeView view;
  view.head_of_token.assign(static_cast<std::size_t>(n) + 2, 0);
  std::vector<bool> link(static_cast<std::size_t>(n) + 2, false);  // link[t]: t and t+1 joined
  bool left = true;
  for (const auto& a : arcs) {
    if (a.label != EdgeLabel::Cont) continue;
    link[static_cast<std::size_t>(std::min(a.head, a.dependent))] = true;
    left = a.head > a.dependent;
  }
  int t = 1;
  while (t <= n) {
    int e = t;
    while (e < n && link[static_cast<std::size_t>(e)]) ++e;
    const Span s{t, e};
    const int h = left ? e : t;
    view.phrases[h] = s;
    for (int k = t; k <= e; ++k) view.head_of_token[static_cast<std::size_t>(k)] = h;
    t = e + 1;
  }
  return view;
}

enum TypeBits : unsigned { kObject = 1, kAttribute = 2, kRelation = 4 };

inline std::map<int, unsigned> infer_types(const ArcSet& arcs) {
  std::map<int, unsigned> types;
  for (const auto& a : arcs) {
    switch (a.label) {
      case EdgeLabel::Attr:
        types[a.head] |= kObject;
        types[a.dependent] |= kAttribute;
        break;
      case EdgeLabel::Subj:
        types[a.head] |= kObject;
        types[a.dependent] |= kRelation;
        break;
      case EdgeLabel::Objt:
        types[a.head] |= kRelation;
        types[a.dependent] |= kObject;
        break;
      case EdgeLabel::Begn:
        types[a.dependent] |= kObject;
        break;
      case EdgeLabel::Cont:
        break;
    }
  }
  types.erase(arcs.root());
  return types;
}

inline std::vector<Arc> semantic_conflicts(const ArcSet& arcs, const NodeView& view) {
  std::set<Arc> bad;
  // Non-CONT arcs must attach to phrase heads.
  for (const auto& a : arcs) {
    if (a.label == EdgeLabel::Cont) continue;
    const bool head_ok = a.head == arcs.root() || view.head_of_token[static_cast<std::size_t>(a.head)] == a.head;
    const bool dep_ok = view.head_of_token[static_cast<std::size_t>(a.dependent)] == a.dependent;
    if (!head_ok || !dep_ok) bad.insert(a);
  }
  const auto types = infer_types(arcs);
  for (const auto& [tok, bits] : types) {
    if (std::popcount(bits) <= 1) continue;
    for (const auto& a : arcs) {
      if (a.label != EdgeLabel::Cont && (a.head == tok || a.dependent == tok)) bad.insert(a);
    }
  }
  return {bad.begin(), bad.end()};
}

inline std::string describe(const std::vector<Arc>& bad) {
  std::set<int> toks;
  for (const auto& a : bad) {
    toks.insert(a.head);
    toks.insert(a.dependent);
  }
  std::string msg = "malformed arcs at tokens";
  for (int t : toks) msg += " " + std::to_string(t);
  return msg;
}

}  // namespace detail

// Every arc that keeps `arcs` from being read back as a scene graph.
// Empty when to_node_centric() would succeed.
inline std::vector<Arc> arc_conflicts(const ArcSet& arcs) {
  auto bad = detail::structural_conflicts(arcs);
  if (!bad.empty()) return bad;
  return detail::semantic_conflicts(arcs, detail::collapse_phrases(arcs));
}

// Reads labeled arcs back as a node-centric graph. Maximal CONT chains become
// one multi-word node; node types follow from the labels of incident arcs.
// Objects come out in sentence order of their head words.
inline SceneGraph to_node_centric(const ArcSet& arcs, const Tokens& tokens) {
  if (static_cast<int>(tokens.size()) != arcs.n_tokens()) {
    throw ContractViolation("token count " + std::to_string(tokens.size()) + " does not match arc set size " +
                            std::to_string(arcs.n_tokens()));
  }
  if (auto bad = arc_conflicts(arcs); !bad.empty()) throw MalformedArcs(detail::describe(bad));

  const auto view = detail::collapse_phrases(arcs);
  const auto types = detail::infer_types(arcs);
  auto label_of = [&](int head) {
    const Span s = view.phrases.at(head);
    Tokens words(tokens.begin() + (s.start - 1), tokens.begin() + s.end);
    return join(words);
  };

  SceneGraph g;
  std::map<int, std::size_t> object_index;
  for (const auto& [tok, bits] : types) {
    if (bits == detail::kObject) {
      object_index[tok] = g.objects.size();
      g.objects.push_back(label_of(tok));
    }
  }
  std::vector<Arc> attr_arcs;
  std::map<int, int> subject_of;
  std::map<int, std::vector<int>> objects_of;
  for (const auto& a : arcs) {
    if (a.label == EdgeLabel::Attr) attr_arcs.push_back(a);
    if (a.label == EdgeLabel::Subj) subject_of[a.dependent] = a.head;
    if (a.label == EdgeLabel::Objt) objects_of[a.head].push_back(a.dependent);
  }
  std::sort(attr_arcs.begin(), attr_arcs.end(), [](const Arc& x, const Arc& y) { return x.dependent < y.dependent; });
  for (const auto& a : attr_arcs) g.attributes.push_back({object_index.at(a.head), label_of(a.dependent)});
  for (const auto& [tok, bits] : types) {
    if (bits != detail::kRelation) continue;
    auto s = subject_of.find(tok);
    auto o = objects_of.find(tok);
    if (s == subject_of.end() || o == objects_of.end()) continue;
    auto targets = o->second;
    std::sort(targets.begin(), targets.end());
    for (int obj : targets) g.relations.push_back({object_index.at(s->second), label_of(tok), object_index.at(obj)});
  }
  return g;
}

// Like to_node_centric, but repairs conflicts by repeatedly dropping the
// latest offending arc in (head, dependent) order. Returns the repaired graph;
// `dropped` (if given) receives the removed arcs.
inline SceneGraph to_node_centric_lenient(const ArcSet& arcs, const Tokens& tokens,
                                          std::vector<Arc>* dropped = nullptr) {
  std::vector<Arc> kept(arcs.begin(), arcs.end());
  for (;;) {
    ArcSet current(arcs.n_tokens(), kept);
    auto bad = arc_conflicts(current);
    if (bad.empty()) return to_node_centric(current, tokens);
    const Arc victim = *std::max_element(bad.begin(), bad.end());
    if (dropped) dropped->push_back(victim);
    kept.erase(std::find(kept.begin(), kept.end(), victim));
  }
}

}  // namespace sgparse
