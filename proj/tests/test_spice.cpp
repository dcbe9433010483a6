#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "sgparse/spice.hpp"

using namespace sgparse;

namespace {

SceneGraph barrier_graph() {
  SceneGraph g;
  g.objects = {"barrier", "person"};
  g.attributes = {{0, "black"}};
  g.relations = {{0, "in front of", 1}};
  return g;
}

// Largest one-to-one matching by trying every injection of the smaller side.
std::size_t brute_force_matching(const std::vector<Tuple>& a, const std::vector<Tuple>& b,
                                 const SynonymLexicon& lex) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  std::vector<std::size_t> idx(large.size());
  std::iota(idx.begin(), idx.end(), 0);
  // every permutation of the larger side, paired position by position
  do {
    std::size_t m = 0;
    for (std::size_t i = 0; i < small.size(); ++i) m += tuples_compatible(small[i], large[idx[i]], lex);
    best = std::max(best, m);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

SceneGraph random_graph(std::mt19937& rng, int max_objects) {
  static const std::vector<std::string> objs{"man", "guy", "dog", "cup", "table"};
  static const std::vector<std::string> attrs{"red", "tall", "wooden"};
  static const std::vector<std::string> rels{"on", "near", "holding"};
  SceneGraph g;
  const int n = static_cast<int>(rng() % static_cast<unsigned>(max_objects + 1));
  for (int i = 0; i < n; ++i) g.objects.push_back(objs[rng() % objs.size()]);
  if (n == 0) return g;
  const int na = static_cast<int>(rng() % 3);
  for (int i = 0; i < na; ++i) g.attributes.push_back({rng() % g.objects.size(), attrs[rng() % attrs.size()]});
  const int nr = static_cast<int>(rng() % 3);
  for (int i = 0; i < nr; ++i) {
    g.relations.push_back({rng() % g.objects.size(), rels[rng() % rels.size()], rng() % g.objects.size()});
  }
  return g;
}

SynonymLexicon man_guy() {
  SynonymLexicon lex;
  lex.add("man", "guy");
  return lex;
}

}  // namespace

TEST(ExtractTuples, Examples) {
  const auto bag = extract_tuples(barrier_graph());
  EXPECT_EQ(bag.object_tuples, (std::vector<Tuple>{{"barrier"}, {"person"}}));
  EXPECT_EQ(bag.attribute_tuples, (std::vector<Tuple>{{"barrier", "black"}}));
  EXPECT_EQ(bag.relation_tuples, (std::vector<Tuple>{{"barrier", "in front of", "person"}}));
  EXPECT_EQ(bag.size(), 4u);
  EXPECT_TRUE(extract_tuples(SceneGraph{}).empty());
  SceneGraph men;
  men.objects = {"man", "Man"};
  EXPECT_EQ(extract_tuples(men).object_tuples, (std::vector<Tuple>{{"man"}, {"man"}}));
}

TEST(MatchCount, Examples) {
  const auto bag = extract_tuples(barrier_graph());
  EXPECT_EQ(match_count(bag, bag, {}).total(), 4u);

  TupleBag two_men;
  two_men.object_tuples = {{"man"}, {"man"}};
  TupleBag one_man;
  one_man.object_tuples = {{"man"}};
  EXPECT_EQ(match_count(two_men, one_man, {}).total(), 1u);

  TupleBag guy;
  guy.object_tuples = {{"guy"}};
  EXPECT_EQ(match_count(guy, one_man, man_guy()).total(), 1u);
  EXPECT_EQ(match_count(guy, one_man, {}).total(), 0u);
}

TEST(MatchCount, NoMatchingAcrossCategories) {
  TupleBag a;
  a.object_tuples = {{"red"}};
  TupleBag b;
  b.attribute_tuples = {{"red", "red"}};
  EXPECT_EQ(match_count(a, b, {}).total(), 0u);
}

TEST(MaxBipartiteMatching, GreedyTrapIsAvoided) {
  // left 0 can take 0 or 1, left 1 only 0: greedy 0->0 would give 1
  EXPECT_EQ(max_bipartite_matching({{0, 1}, {0}}, 2), 2u);
  EXPECT_EQ(max_bipartite_matching({}, 0), 0u);
  EXPECT_EQ(max_bipartite_matching({{}, {}}, 3), 0u);
}

TEST(MaxBipartiteMatching, EqualsBruteForceOnSmallBags) {
  std::mt19937 rng(21);
  const auto lex = man_guy();
  static const std::vector<std::string> words{"man", "guy", "dog", "cup"};
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<Tuple> a(rng() % 7);
    std::vector<Tuple> b(rng() % 7);
    const std::size_t arity = 1 + rng() % 2;
    for (auto* side : {&a, &b}) {
      for (auto& t : *side) {
        for (std::size_t k = 0; k < arity; ++k) t.push_back(words[rng() % words.size()]);
      }
    }
    std::vector<std::vector<std::size_t>> adj(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (tuples_compatible(a[i], b[j], lex)) adj[i].push_back(j);
      }
    }
    EXPECT_EQ(max_bipartite_matching(adj, b.size()), brute_force_matching(a, b, lex));
  }
}

TEST(FScore, Examples) {
  const auto g = barrier_graph();
  const auto self = f_score(g, g, {});
  EXPECT_DOUBLE_EQ(self.f, 1.0);

  SceneGraph partial = g;
  partial.relations.clear();
  const auto s = f_score(partial, g, {});
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_DOUBLE_EQ(s.recall, 0.75);
  EXPECT_NEAR(s.f, 6.0 / 7.0, 1e-12);

  SceneGraph other;
  other.objects = {"cat"};
  EXPECT_DOUBLE_EQ(f_score(other, g, {}).f, 0.0);
  EXPECT_DOUBLE_EQ(f_score(SceneGraph{}, SceneGraph{}, {}).f, 1.0);
  EXPECT_DOUBLE_EQ(f_score(SceneGraph{}, g, {}).f, 0.0);
  EXPECT_DOUBLE_EQ(f_score(g, SceneGraph{}, {}).f, 0.0);
}

TEST(FScore, PropertiesOnRandomGraphs) {
  std::mt19937 rng(77);
  const auto lex = man_guy();
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = random_graph(rng, 4);
    const auto b = random_graph(rng, 4);
    const auto ba = extract_tuples(a);
    const auto bb = extract_tuples(b);
    const auto ab = match_count(ba, bb, lex);
    const auto rev = match_count(bb, ba, lex);
    EXPECT_EQ(ab.per_category, rev.per_category);
    for (std::size_t c = 0; c < kTupleCategories; ++c) {
      const auto cat = static_cast<TupleCategory>(c);
      EXPECT_LE(ab.per_category[c], std::min(ba.category(cat).size(), bb.category(cat).size()));
    }
    const auto s = f_score(ba, bb, lex);
    for (double v : {s.precision, s.recall, s.f}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    if (!ba.empty() || !bb.empty()) {
      EXPECT_EQ(s.f == 0.0, ab.total() == 0);
      EXPECT_EQ(s.f == 1.0, s.precision == 1.0 && s.recall == 1.0);
    }
    EXPECT_DOUBLE_EQ(f_score(a, a, lex).f, 1.0);
  }
}

TEST(CorpusF, MeanOfRegionScores) {
  const auto g = barrier_graph();
  SceneGraph other;
  other.objects = {"cat"};
  EXPECT_DOUBLE_EQ(corpus_f({g, g}, {g, g}, {}), 1.0);
  EXPECT_DOUBLE_EQ(corpus_f({g, other}, {g, g}, {}), 0.5);
  EXPECT_THROW(corpus_f({g}, {g, g}, {}), ContractViolation);
}

TEST(EvalAccumulator, ReportHasTableAndKeyValues) {
  const auto g = barrier_graph();
  SceneGraph partial = g;
  partial.relations.clear();
  EvalAccumulator acc;
  acc.add(extract_tuples(partial), extract_tuples(g), {});
  acc.add(extract_tuples(g), extract_tuples(g), {});
  EXPECT_EQ(acc.regions(), 2u);
  EXPECT_NEAR(acc.mean_f(), (6.0 / 7.0 + 1.0) / 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(acc.category(TupleCategory::Relation).recall, 0.5);
  const auto r = acc.report();
  EXPECT_NE(r.find("category"), std::string::npos);
  EXPECT_NE(r.find("relation_recall=0.5"), std::string::npos);
  EXPECT_NE(r.find("regions=2"), std::string::npos);
  EXPECT_NE(r.find("mean_f="), std::string::npos);
}
