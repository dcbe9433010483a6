#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "sgparse/alignment.hpp"
#include "sgparse/corpus.hpp"
#include "sgparse/edge_centric.hpp"
#include "sgparse/nn/model.hpp"
#include "sgparse/nn/trainer.hpp"
#include "sgparse/parallel.hpp"
#include "sgparse/spice.hpp"
#include "sgparse/transition.hpp"

// Glue shared by the CLI and the tests: corpus records to supervision, and
// model output back to scene graphs.

namespace sgparse {

enum class GoldStatus { Ok, Cyclic, AlignmentConflict, NonProjective };

inline std::string_view to_string(GoldStatus s) {
  switch (s) {
    case GoldStatus::Ok: return "ok";
    case GoldStatus::Cyclic: return "cyclic";
    case GoldStatus::AlignmentConflict: return "alignment-conflict";
    case GoldStatus::NonProjective: return "non-projective";
  }
  return "?";
}

struct GoldRecord {
  std::int64_t region_id = 0;
  Tokens tokens;
  GoldStatus status = GoldStatus::Ok;
  ArcSet arcs;
  std::set<int> reduce_set;
  std::size_t nodes = 0;
  std::size_t aligned_nodes = 0;

  bool trainable() const { return status == GoldStatus::Ok; }
};

inline std::size_t node_count(const SceneGraph& g) {
  return g.objects.size() + g.attributes.size() + g.relations.size();
}

inline GoldRecord derive_record_gold(const RegionRecord& rec, const SynonymLexicon& lexicon, ArcRule rule,
                                     AlignMode mode) {
  GoldRecord out;
  out.region_id = rec.region_id;
  out.tokens = tokenize(rec.phrase);
  out.nodes = node_count(rec.graph);
  const int n = static_cast<int>(out.tokens.size());
  out.arcs = ArcSet(n, {});
  const auto alignment = align(out.tokens, rec.graph, lexicon, mode);
  out.aligned_nodes = alignment.aligned_nodes.size();
  try {
    auto gold = derive_gold(alignment, rec.graph, rule, n);
    out.arcs = std::move(gold.arcs);
    out.reduce_set = std::move(gold.reduce_set);
  } catch (const sgparse::AlignmentConflict&) {
    out.status = GoldStatus::AlignmentConflict;
    for (int t = 1; t <= n; ++t) out.reduce_set.insert(t);
    return out;
  }
  if (!is_acyclic(rec.graph)) {
    out.status = GoldStatus::Cyclic;
  } else if (!is_projective(out.arcs)) {
    out.status = GoldStatus::NonProjective;
  }
  return out;
}

// Per-record work fans out; results keep corpus order.
inline std::vector<GoldRecord> derive_corpus_gold(const std::vector<RegionRecord>& records,
                                                  const SynonymLexicon& lexicon, ArcRule rule, AlignMode mode) {
  return parallel_map(records.size(), [&](std::size_t i) { return derive_record_gold(records[i], lexicon, rule, mode); });
}

// Scene graph an ideal parser would produce: the gold arcs read back.
inline SceneGraph oracle_graph(const GoldRecord& g) { return to_node_centric_lenient(g.arcs, g.tokens); }

// Gold file: one line per region, "region_id <TAB> status <TAB> tokens
// <TAB> head,dep,LABEL;... <TAB> reduce tokens". Sorted by region id.
inline void write_gold(std::ostream& out, std::vector<GoldRecord> gold) {
  std::sort(gold.begin(), gold.end(), [](const auto& a, const auto& b) { return a.region_id < b.region_id; });
  for (const auto& g : gold) {
    out << g.region_id << "\t" << to_string(g.status) << "\t" << join(g.tokens) << "\t";
    bool first = true;
    for (const auto& a : g.arcs) {
      out << (first ? "" : ";") << a.head << "," << a.dependent << "," << to_string(a.label);
      first = false;
    }
    out << "\t";
    first = true;
    for (int t : g.reduce_set) {
      out << (first ? "" : ",") << t;
      first = false;
    }
    out << "\n";
  }
}

struct AlignmentStats {
  std::size_t regions = 0;
  std::size_t trainable = 0;
  std::size_t cyclic = 0;
  std::size_t conflicts = 0;
  std::size_t non_projective = 0;
  std::size_t nodes = 0;
  std::size_t aligned_nodes = 0;

  double node_coverage() const { return nodes ? static_cast<double>(aligned_nodes) / static_cast<double>(nodes) : 0.0; }
};

inline AlignmentStats alignment_stats(const std::vector<GoldRecord>& gold) {
  AlignmentStats s;
  for (const auto& g : gold) {
    ++s.regions;
    s.nodes += g.nodes;
    s.aligned_nodes += g.aligned_nodes;
    switch (g.status) {
      case GoldStatus::Ok: ++s.trainable; break;
      case GoldStatus::Cyclic: ++s.cyclic; break;
      case GoldStatus::AlignmentConflict: ++s.conflicts; break;
      case GoldStatus::NonProjective: ++s.non_projective; break;
    }
  }
  return s;
}

inline std::vector<nn::TrainingInstance> training_instances(const std::vector<GoldRecord>& gold) {
  std::vector<nn::TrainingInstance> out;
  for (const auto& g : gold) {
    if (g.trainable()) out.push_back({g.tokens, g.arcs, g.reduce_set});
  }
  return out;
}

inline SceneGraph parse_graph(const nn::ModelParams& params, const Tokens& tokens) {
  return to_node_centric_lenient(nn::parse(params, tokens), tokens);
}

inline SceneGraph parse_graph(const nn::ModelParams& params, std::string_view sentence) {
  return parse_graph(params, tokenize(sentence));
}

// Parses every record and scores it against the record's own graph.
inline EvalAccumulator evaluate_parser(const nn::ModelParams& params, const std::vector<RegionRecord>& records,
                                       const SynonymLexicon& lexicon) {
  const auto bags = parallel_map(records.size(), [&](std::size_t i) {
    return extract_tuples(parse_graph(params, std::string_view(records[i].phrase)));
  });
  EvalAccumulator acc;
  for (std::size_t i = 0; i < records.size(); ++i) acc.add(bags[i], extract_tuples(records[i].graph), lexicon);
  return acc;
}

}  // namespace sgparse
