#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sgparse/errors.hpp"
#include "sgparse/lexicon.hpp"
#include "sgparse/scene_graph.hpp"
#include "sgparse/text.hpp"

namespace sgparse {

// A semantic proposition: (object), (object, attribute) or
// (subject, relation, object), with normalized labels.
using Tuple = std::vector<std::string>;

enum class TupleCategory { Object = 0, Attribute = 1, Relation = 2 };
inline constexpr std::size_t kTupleCategories = 3;

struct TupleBag {
  std::vector<Tuple> object_tuples;
  std::vector<Tuple> attribute_tuples;
  std::vector<Tuple> relation_tuples;

  const std::vector<Tuple>& category(TupleCategory c) const {
    switch (c) {
      case TupleCategory::Object: return object_tuples;
      case TupleCategory::Attribute: return attribute_tuples;
      case TupleCategory::Relation: return relation_tuples;
    }
    return object_tuples;
  }

  std::size_t size() const { return object_tuples.size() + attribute_tuples.size() + relation_tuples.size(); }
  bool empty() const { return size() == 0; }
};

inline TupleBag extract_tuples(const SceneGraph& graph) {
  TupleBag bag;
  auto obj = [&](std::size_t i) { return normalize_label(graph.objects.at(i)); };
  for (std::size_t i = 0; i < graph.objects.size(); ++i) bag.object_tuples.push_back({obj(i)});
  for (const auto& a : graph.attributes) bag.attribute_tuples.push_back({obj(a.object), normalize_label(a.label)});
  for (const auto& r : graph.relations) {
    bag.relation_tuples.push_back({obj(r.subject), normalize_label(r.label), obj(r.object)});
  }
  // deterministic order; multiplicity kept
  std::sort(bag.object_tuples.begin(), bag.object_tuples.end());
  std::sort(bag.attribute_tuples.begin(), bag.attribute_tuples.end());
  std::sort(bag.relation_tuples.begin(), bag.relation_tuples.end());
  return bag;
}

inline bool tuples_compatible(const Tuple& a, const Tuple& b, const SynonymLexicon& lexicon) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!labels_compatible(a[i], b[i], lexicon)) return false;
  }
  return true;
}

// Size of a maximum matching in a bipartite graph given as adjacency lists
// from left vertices to right vertices (augmenting paths, Kuhn's method).
inline std::size_t max_bipartite_matching(const std::vector<std::vector<std::size_t>>& adj, std::size_t n_right) {
  std::vector<std::size_t> match_right(n_right, SIZE_MAX);
  std::vector<char> seen;
  std::function<bool(std::size_t)> augment = [&](std::size_t u) -> bool {
    for (std::size_t v : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      if (match_right[v] == SIZE_MAX || augment(match_right[v])) {
        match_right[v] = u;
        return true;
      }
    }
    return false;
  };
  std::size_t matched = 0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    seen.assign(n_right, 0);
    if (augment(u)) ++matched;
  }
  return matched;
}

struct MatchCounts {
  std::array<std::size_t, kTupleCategories> per_category{};
  std::size_t total() const { return per_category[0] + per_category[1] + per_category[2]; }
};

// One-to-one matching within each category: every tuple is used at most once
// on either side.
inline MatchCounts match_count(const TupleBag& candidate, const TupleBag& reference, const SynonymLexicon& lexicon) {
  MatchCounts out;
  for (std::size_t c = 0; c < kTupleCategories; ++c) {
    const auto& cand = candidate.category(static_cast<TupleCategory>(c));
    const auto& ref = reference.category(static_cast<TupleCategory>(c));
    std::vector<std::vector<std::size_t>> adj(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) {
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (tuples_compatible(cand[i], ref[j], lexicon)) adj[i].push_back(j);
      }
    }
    out.per_category[c] = max_bipartite_matching(adj, ref.size());
  }
  return out;
}

struct FScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

inline FScore f_from_counts(std::size_t matched, std::size_t n_candidate, std::size_t n_reference) {
  if (n_candidate == 0 && n_reference == 0) return {1.0, 1.0, 1.0};
  if (n_candidate == 0 || n_reference == 0) {
    return {n_candidate == 0 ? 1.0 : 0.0, n_reference == 0 ? 1.0 : 0.0, 0.0};
  }
  const double p = static_cast<double>(matched) / static_cast<double>(n_candidate);
  const double r = static_cast<double>(matched) / static_cast<double>(n_reference);
  return {p, r, (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0};
}

inline FScore f_score(const TupleBag& candidate, const TupleBag& reference, const SynonymLexicon& lexicon) {
  return f_from_counts(match_count(candidate, reference, lexicon).total(), candidate.size(), reference.size());
}

inline FScore f_score(const SceneGraph& candidate, const SceneGraph& reference, const SynonymLexicon& lexicon) {
  return f_score(extract_tuples(candidate), extract_tuples(reference), lexicon);
}

inline double corpus_f(const std::vector<SceneGraph>& candidates, const std::vector<SceneGraph>& references,
                       const SynonymLexicon& lexicon) {
  if (candidates.size() != references.size()) {
    throw ContractViolation("corpus_f: " + std::to_string(candidates.size()) + " candidates vs " +
                            std::to_string(references.size()) + " references");
  }
  if (candidates.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) sum += f_score(candidates[i], references[i], lexicon).f;
  return sum / static_cast<double>(candidates.size());
}

// Corpus-level accumulator behind the evaluation report: micro-averaged
// P/R/F per category plus the mean per-region F.
class EvalAccumulator {
 public:
  void add(const TupleBag& candidate, const TupleBag& reference, const SynonymLexicon& lexicon) {
    const auto m = match_count(candidate, reference, lexicon);
    for (std::size_t c = 0; c < kTupleCategories; ++c) {
      matched_[c] += m.per_category[c];
      n_candidate_[c] += candidate.category(static_cast<TupleCategory>(c)).size();
      n_reference_[c] += reference.category(static_cast<TupleCategory>(c)).size();
    }
    f_sum_ += f_from_counts(m.total(), candidate.size(), reference.size()).f;
    ++regions_;
  }

  std::size_t regions() const { return regions_; }
  double mean_f() const { return regions_ ? f_sum_ / static_cast<double>(regions_) : 0.0; }

  FScore category(TupleCategory c) const {
    const auto i = static_cast<std::size_t>(c);
    return f_from_counts(matched_[i], n_candidate_[i], n_reference_[i]);
  }

  // Human-readable table followed by key=value lines.
  std::string report() const {
    static constexpr const char* kNames[] = {"object", "attribute", "relation"};
    std::string out = "category     precision  recall     f\n";
    char line[128];
    for (std::size_t c = 0; c < kTupleCategories; ++c) {
      const auto s = category(static_cast<TupleCategory>(c));
      std::snprintf(line, sizeof line, "%-12s %-10.4f %-10.4f %.4f\n", kNames[c], s.precision, s.recall, s.f);
      out += line;
    }
    std::snprintf(line, sizeof line, "mean F over %zu regions: %.4f\n", regions_, mean_f());
    out += line;
    for (std::size_t c = 0; c < kTupleCategories; ++c) {
      const auto s = category(static_cast<TupleCategory>(c));
      std::snprintf(line, sizeof line, "%s_precision=%.6f\n%s_recall=%.6f\n%s_f=%.6f\n", kNames[c], s.precision,
                    kNames[c], s.recall, kNames[c], s.f);
      out += line;
    }
    std::snprintf(line, sizeof line, "regions=%zu\nmean_f=%.6f\n", regions_, mean_f());
    out += line;
    return out;
  }

 private:
  std::array<std::size_t, kTupleCategories> matched_{};
  std::array<std::size_t, kTupleCategories> n_candidate_{};
  std::array<std::size_t, kTupleCategories> n_reference_{};
  double f_sum_ = 0.0;
  std::size_t regions_ = 0;
};

}  // namespace sgparse
