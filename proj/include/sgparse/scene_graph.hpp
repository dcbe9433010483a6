#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "sgparse/errors.hpp"

namespace sgparse {

struct Attribute {
  std::size_t object = 0;
  std::string label;

  friend bool operator==(const Attribute&, const Attribute&) = default;
  friend auto operator<=>(const Attribute&, const Attribute&) = default;
};

struct Relation {
  std::size_t subject = 0;
  std::string label;
  std::size_t object = 0;

  friend bool operator==(const Relation&, const Relation&) = default;
  friend auto operator<=>(const Relation&, const Relation&) = default;
};

// Node-centric scene graph. Objects are instances: identity is the index
// into `objects`, so two objects may share a label.
struct SceneGraph {
  std::vector<std::string> objects;
  std::vector<Attribute> attributes;
  std::vector<Relation> relations;

  bool empty() const { return objects.empty() && attributes.empty() && relations.empty(); }

  // Throws ContractViolation if an attribute or relation points past `objects`.
  void validate() const {
    const auto n = objects.size();
    for (const auto& a : attributes) {
      if (a.object >= n) throw ContractViolation("attribute references object " + std::to_string(a.object) + " of " + std::to_string(n));
    }
    for (const auto& r : relations) {
      if (r.subject >= n || r.object >= n) {
        throw ContractViolation("relation '" + r.label + "' references an object out of range");
      }
    }
  }

  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

// True iff the node-centric graph (o -> a, o1 -> r -> o2) has no directed
// cycle. Attribute nodes are sinks, so only relations can close a cycle.
inline bool is_acyclic(const SceneGraph& graph) {
  const std::size_t n = graph.objects.size();
  std::vector<std::vector<std::size_t>> next(n);
  for (const auto& r : graph.relations) {
    if (r.subject < n && r.object < n) next[r.subject].push_back(r.object);
  }
  enum class Mark { White, Grey, Black };
  std::vector<Mark> mark(n, Mark::White);
  // iterative DFS; frames hold (node, next child position)
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t s = 0; s < n; ++s) {
    if (mark[s] != Mark::White) continue;
    frames.emplace_back(s, 0);
    mark[s] = Mark::Grey;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < next[v].size()) {
        const std::size_t w = next[v][pos++];
        if (mark[w] == Mark::Grey) return false;
        if (mark[w] == Mark::White) {
          mark[w] = Mark::Grey;
          frames.emplace_back(w, 0);
        }
      } else {
        mark[v] = Mark::Black;
        frames.pop_back();
      }
    }
  }
  return true;
}

// Graph equality up to a permutation of `objects` (attribute and relation
// lists compared as multisets). Backtracks over label-compatible objects.
inline bool equivalent(const SceneGraph& a, const SceneGraph& b) {
  const std::size_t n = a.objects.size();
  if (n != b.objects.size() || a.attributes.size() != b.attributes.size() ||
      a.relations.size() != b.relations.size()) {
    return false;
  }
  std::vector<std::size_t> perm(n, n);  // a-index -> b-index
  std::vector<bool> used(n, false);

  auto check = [&]() {
    std::vector<Attribute> aa;
    for (const auto& x : a.attributes) aa.push_back({perm[x.object], x.label});
    std::vector<Relation> ar;
    for (const auto& x : a.relations) ar.push_back({perm[x.subject], x.label, perm[x.object]});
    auto ba = b.attributes;
    auto br = b.relations;
    std::sort(aa.begin(), aa.end());
    std::sort(ba.begin(), ba.end());
    std::sort(ar.begin(), ar.end());
    std::sort(br.begin(), br.end());
    return aa == ba && ar == br;
  };

  std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
    if (i == n) return check();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || a.objects[i] != b.objects[j]) continue;
      used[j] = true;
      perm[i] = j;
      if (assign(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  return assign(0);
}

enum class EdgeLabel { Attr, Subj, Objt, Cont, Begn };

inline constexpr std::array<EdgeLabel, 5> kAllEdgeLabels = {EdgeLabel::Attr, EdgeLabel::Subj, EdgeLabel::Objt,
                                                            EdgeLabel::Cont, EdgeLabel::Begn};

inline std::string_view to_string(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::Attr: return "ATTR";
    case EdgeLabel::Subj: return "SUBJ";
    case EdgeLabel::Objt: return "OBJT";
    case EdgeLabel::Cont: return "CONT";
    case EdgeLabel::Begn: return "BEGN";
  }
  return "?";
}

inline std::optional<EdgeLabel> parse_edge_label(std::string_view s) {
  for (auto l : kAllEdgeLabels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

// Direction of CONT chains inside multi-word nodes. Under LeftArc every CONT
// arc points left and the rightmost word heads the phrase.
enum class ArcRule { LeftArc, RightArc };

inline std::string_view to_string(ArcRule r) { return r == ArcRule::LeftArc ? "left" : "right"; }

// Token indices are 1-based; ROOT is n_tokens + 1.
struct Arc {
  int head = 0;
  int dependent = 0;
  EdgeLabel label = EdgeLabel::Attr;

  friend bool operator==(const Arc&, const Arc&) = default;
  friend bool operator<(const Arc& x, const Arc& y) {
    return std::tie(x.head, x.dependent, x.label) < std::tie(y.head, y.dependent, y.label);
  }
};

// Edge-centric scene graph: a set of labeled arcs over sentence positions,
// kept sorted by (head, dependent).
class ArcSet {
 public:
  ArcSet() = default;
  explicit ArcSet(int n_tokens) : n_tokens_(n_tokens) {}
  ArcSet(int n_tokens, std::vector<Arc> arcs) : n_tokens_(n_tokens), arcs_(std::move(arcs)) {
    std::sort(arcs_.begin(), arcs_.end());
    arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
  }

  int n_tokens() const { return n_tokens_; }
  int root() const { return n_tokens_ + 1; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t size() const { return arcs_.size(); }
  bool empty() const { return arcs_.empty(); }
  auto begin() const { return arcs_.begin(); }
  auto end() const { return arcs_.end(); }

  void insert(const Arc& a) {
    auto it = std::lower_bound(arcs_.begin(), arcs_.end(), a);
    if (it == arcs_.end() || !(*it == a)) arcs_.insert(it, a);
  }

  bool contains(const Arc& a) const { return std::binary_search(arcs_.begin(), arcs_.end(), a); }

  std::optional<Arc> arc_to(int dependent) const {
    for (const auto& a : arcs_) {
      if (a.dependent == dependent) return a;
    }
    return std::nullopt;
  }

  bool has_head(int dependent) const { return arc_to(dependent).has_value(); }

  // Throws MalformedArcs when a structural invariant is broken.
  void validate() const {
    std::vector<int> heads(static_cast<std::size_t>(n_tokens_) + 2, 0);
    for (const auto& a : arcs_) {
      const bool head_ok = a.head >= 1 && a.head <= root();
      const bool dep_ok = a.dependent >= 1 && a.dependent <= n_tokens_;
      if (!head_ok || !dep_ok) throw MalformedArcs("arc index out of range");
      if (++heads[static_cast<std::size_t>(a.dependent)] > 1) {
        throw MalformedArcs("token " + std::to_string(a.dependent) + " has more than one head");
      }
      if ((a.label == EdgeLabel::Begn) != (a.head == root())) {
        throw MalformedArcs("BEGN arcs must, and only they may, start at ROOT");
      }
      if (a.label == EdgeLabel::Cont && std::abs(a.head - a.dependent) != 1) {
        throw MalformedArcs("CONT arc between non-adjacent tokens " + std::to_string(a.head) + "," +
                            std::to_string(a.dependent));
      }
    }
  }

  friend bool operator==(const ArcSet&, const ArcSet&) = default;

 private:
  int n_tokens_ = 0;
  std::vector<Arc> arcs_;
};

// No two arcs cross when drawn over the token order (ROOT sits after the
// last token).
inline bool is_projective(const ArcSet& arcs) {
  const auto& v = arcs.arcs();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int l1 = std::min(v[i].head, v[i].dependent);
    const int r1 = std::max(v[i].head, v[i].dependent);
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const int l2 = std::min(v[j].head, v[j].dependent);
      const int r2 = std::max(v[j].head, v[j].dependent);
      if ((l1 < l2 && l2 < r1 && r1 < r2) || (l2 < l1 && l1 < r2 && r2 < r1)) return false;
    }
  }
  return true;
}

}  // namespace sgparse
