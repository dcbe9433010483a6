#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>

namespace sgparse {

enum class NodeKind { Object, Attribute, Relation };

// Identifies a node of a SceneGraph by kind and position in the matching
// list (objects, attributes or relations).
struct NodeRef {
  NodeKind kind = NodeKind::Object;
  std::size_t index = 0;

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

inline NodeRef object_node(std::size_t i) { return {NodeKind::Object, i}; }
inline NodeRef attribute_node(std::size_t i) { return {NodeKind::Attribute, i}; }
inline NodeRef relation_node(std::size_t i) { return {NodeKind::Relation, i}; }

// Inclusive 1-based token range.
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int t) const { return t >= start && t <= end; }
  bool overlaps(const Span& o) const { return start <= o.end && o.start <= end; }

  friend auto operator<=>(const Span&, const Span&) = default;
};

struct AlignmentResult {
  std::map<NodeRef, Span> node_spans;
  std::set<int> aligned_words;
  std::set<NodeRef> aligned_nodes;

  bool aligned(const NodeRef& n) const { return node_spans.contains(n); }

  const Span* span_of(const NodeRef& n) const {
    auto it = node_spans.find(n);
    return it == node_spans.end() ? nullptr : &it->second;
  }

  void add(const NodeRef& n, const Span& s) {
    node_spans[n] = s;
    aligned_nodes.insert(n);
    for (int t = s.start; t <= s.end; ++t) aligned_words.insert(t);
  }

  friend bool operator==(const AlignmentResult&, const AlignmentResult&) = default;
};

}  // namespace sgparse
