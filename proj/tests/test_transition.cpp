#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "sgparse/alignment.hpp"
#include "sgparse/corpus.hpp"
#include "sgparse/transition.hpp"

using namespace sgparse;

namespace {

const Tokens kBarrier = tokenize("black barrier in front of the person");
constexpr int kN = 7;
constexpr int kRoot = 8;

ArcSet barrier_gold() {
  return ArcSet(kN, {{2, 1, EdgeLabel::Attr},
                     {4, 3, EdgeLabel::Cont},
                     {5, 4, EdgeLabel::Cont},
                     {2, 5, EdgeLabel::Subj},
                     {5, 7, EdgeLabel::Objt},
                     {kRoot, 2, EdgeLabel::Begn}});
}

const std::set<int> kBarrierReduce{6};

std::vector<Action> barrier_actions() {
  using A = Action;
  return {A::shift(),
          A::left(EdgeLabel::Attr),
          A::shift(),
          A::shift(),
          A::left(EdgeLabel::Cont),
          A::shift(),
          A::left(EdgeLabel::Cont),
          A::shift(),
          A::shift(),
          A::reduce(),
          A::shift(),
          A::right(EdgeLabel::Objt),
          A::right(EdgeLabel::Subj),
          A::left(EdgeLabel::Begn)};
}

Configuration state_at_row(std::size_t row) {
  const auto acts = barrier_actions();
  return run_actions(kN, std::vector<Action>(acts.begin(), acts.begin() + static_cast<long>(row)));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> names(const std::vector<Action>& v) {
  std::set<std::string> out;
  for (const auto& a : v) out.insert(to_string(a));
  return out;
}

}  // namespace

TEST(ActionInventory, TenActionsPerRule) {
  const ActionInventory left(ArcRule::LeftArc);
  const ActionInventory right(ArcRule::RightArc);
  EXPECT_EQ(left.size(), 10u);
  EXPECT_EQ(right.size(), 10u);
  EXPECT_TRUE(left.index_of(Action::left(EdgeLabel::Cont)).has_value());
  EXPECT_FALSE(left.index_of(Action::right(EdgeLabel::Cont)).has_value());
  EXPECT_TRUE(right.index_of(Action::right(EdgeLabel::Cont)).has_value());
  EXPECT_FALSE(right.index_of(Action::left(EdgeLabel::Cont)).has_value());
  EXPECT_FALSE(left.index_of(Action::right(EdgeLabel::Begn)).has_value());
  for (const auto& a : left) EXPECT_EQ(parse_action(to_string(a)), a);
}

TEST(Initial, Examples) {
  const auto c7 = initial(7);
  EXPECT_TRUE(c7.stack().empty());
  EXPECT_EQ(c7.buffer(), (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_FALSE(c7.is_terminal());
  EXPECT_EQ(initial(0).buffer(), std::vector<int>{1});
  EXPECT_TRUE(initial(0).is_terminal());
  EXPECT_EQ(initial(1).buffer(), (std::vector<int>{1, 2}));
}

TEST(LegalActions, Examples) {
  const ActionInventory inv;
  EXPECT_EQ(names(legal_actions(initial(7), inv)), std::set<std::string>{"SHIFT"});

  const auto row9 = state_at_row(9);
  ASSERT_EQ(row9.stack(), (std::vector<int>{2, 5, 6}));
  EXPECT_EQ(names(legal_actions(row9, inv)),
            (std::set<std::string>{"SHIFT", "REDUCE", "LEFT(ATTR)", "LEFT(SUBJ)", "LEFT(OBJT)", "LEFT(CONT)",
                                   "RIGHT(ATTR)", "RIGHT(SUBJ)", "RIGHT(OBJT)"}));

  const auto lone = initial(1).apply(Action::shift());
  EXPECT_EQ(names(legal_actions(lone, inv)), (std::set<std::string>{"LEFT(BEGN)", "REDUCE"}));
}

TEST(Apply, BarrierRows) {
  const auto row4 = state_at_row(4);
  const auto row5 = row4.apply(Action::left(EdgeLabel::Cont));
  EXPECT_TRUE(row5.arcs().contains({4, 3, EdgeLabel::Cont}));
  EXPECT_EQ(row5.stack(), std::vector<int>{2});

  const auto row11 = state_at_row(11);
  const auto row12 = row11.apply(Action::right(EdgeLabel::Objt));
  EXPECT_TRUE(row12.arcs().contains({5, 7, EdgeLabel::Objt}));
  EXPECT_EQ(row12.stack(), (std::vector<int>{2, 5}));

  const auto reduced = row11.apply(Action::reduce());
  EXPECT_EQ(reduced.arcs(), row11.arcs());
  EXPECT_EQ(reduced.stack(), (std::vector<int>{2, 5}));
}

TEST(Apply, IllegalActionThrows) {
  EXPECT_THROW(initial(3).apply(Action::reduce()), PreconditionViolation);
  EXPECT_THROW(initial(0).apply(Action::shift()), PreconditionViolation);
  EXPECT_THROW(initial(2).apply(Action::shift()).apply(Action::left(EdgeLabel::Begn)), PreconditionViolation);
}

TEST(Apply, IsPure) {
  const auto c = state_at_row(3);
  const auto copy = c;
  (void)c.apply(Action::shift());
  EXPECT_EQ(c, copy);
}

TEST(IsTerminal, AfterTheFullBarrierSequence) { EXPECT_TRUE(state_at_row(14).is_terminal()); }

TEST(Oracle, BarrierRows) {
  const ActionInventory inv;
  const auto gold = barrier_gold();
  EXPECT_EQ(names(oracle(state_at_row(9), gold, kBarrierReduce, inv)), std::set<std::string>{"REDUCE"});
  EXPECT_EQ(names(oracle(state_at_row(1), gold, kBarrierReduce, inv)), std::set<std::string>{"LEFT(ATTR)"});
  EXPECT_EQ(names(oracle(state_at_row(0), gold, kBarrierReduce, inv)), std::set<std::string>{"SHIFT"});
}

TEST(Oracle, BarrierSequenceAndTrace) {
  const auto actions = oracle_parse(kN, barrier_gold(), kBarrierReduce, ActionInventory());
  EXPECT_EQ(actions, barrier_actions());
  EXPECT_EQ(run_actions(kN, actions).arcs(), barrier_gold());
  EXPECT_EQ(format_trace(kBarrier, actions), read_file(std::string(SGPARSE_TEST_DATA) + "/barrier_trace.tsv"));
}

TEST(Oracle, EmptyGoldReducesEachTokenAsSoonAsItIsShifted) {
  // REDUCE is the only correct action whenever the top is in reduce_set, so a
  // token is popped right after its SHIFT (as in row 9 of the barrier trace).
  const auto actions = oracle_parse(3, ArcSet(3), {1, 2, 3}, ActionInventory());
  const std::vector<Action> expected{Action::shift(), Action::reduce(), Action::shift(),
                                     Action::reduce(), Action::shift(), Action::reduce()};
  EXPECT_EQ(actions, expected);
  EXPECT_TRUE(oracle_parse(0, ArcSet(0), {}, ActionInventory()).empty());
}

TEST(Oracle, NonProjectiveGoldGetsStuck) {
  // 1->3 and 2->4 cross
  const ArcSet gold(4, {{1, 3, EdgeLabel::Attr},
                        {2, 4, EdgeLabel::Attr},
                        {5, 1, EdgeLabel::Begn},
                        {5, 2, EdgeLabel::Begn}});
  EXPECT_FALSE(is_projective(gold));
  EXPECT_THROW(oracle_parse(4, gold, {}, ActionInventory()), OracleStuck);
}

TEST(Oracle, RightRuleBarrier) {
  const ArcSet gold(kN, {{2, 1, EdgeLabel::Attr},
                         {3, 4, EdgeLabel::Cont},
                         {4, 5, EdgeLabel::Cont},
                         {2, 3, EdgeLabel::Subj},
                         {3, 7, EdgeLabel::Objt},
                         {kRoot, 2, EdgeLabel::Begn}});
  const ActionInventory inv(ArcRule::RightArc);
  EXPECT_EQ(run_actions(kN, oracle_parse(kN, gold, kBarrierReduce, inv)).arcs(), gold);
}

// Oracle completeness, arc count and the length bound on synthetic gold.
class OracleProperties : public ::testing::TestWithParam<ArcRule> {};

TEST_P(OracleProperties, SyntheticGoldIsReproduced) {
  const ActionInventory inv(GetParam());
  for (const auto& rec : generate_synthetic(500, 23)) {
    const auto toks = tokenize(rec.phrase);
    const int n = static_cast<int>(toks.size());
    const auto gold = derive_gold(align(toks, rec.graph, SynonymLexicon{}), rec.graph, GetParam(), n);
    ASSERT_TRUE(is_projective(gold.arcs)) << rec.phrase;
    const auto actions = oracle_parse(n, gold.arcs, gold.reduce_set, inv);
    EXPECT_LE(actions.size(), static_cast<std::size_t>(2 * n + 1));
    Configuration c = initial(n);
    std::set<int> reduced;
    for (const auto& a : actions) {
      if (a.kind == ActionKind::Reduce) reduced.insert(*c.stack_at(0));
      c = c.apply(a);
    }
    EXPECT_TRUE(c.is_terminal());
    EXPECT_EQ(c.arcs(), gold.arcs) << rec.phrase;
    EXPECT_EQ(reduced, gold.reduce_set) << rec.phrase;
    EXPECT_EQ(c.arcs().size() + reduced.size(), static_cast<std::size_t>(n));
  }
}

INSTANTIATE_TEST_SUITE_P(BothRules, OracleProperties, ::testing::Values(ArcRule::LeftArc, ArcRule::RightArc),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Progress, RandomLegalWalksTerminateWithinBound) {
  std::mt19937 rng(9);
  const ActionInventory inv;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = static_cast<int>(rng() % 10);
    Configuration c = initial(n);
    std::size_t steps = 0;
    while (!c.is_terminal()) {
      const auto legal = legal_actions(c, inv);
      ASSERT_FALSE(legal.empty());
      c = c.apply(legal[rng() % legal.size()]);
      ++steps;
      ASSERT_LE(steps, static_cast<std::size_t>(2 * n + 1));
      // stack and buffer stay disjoint, ROOT never on the stack
      for (int t : c.stack()) {
        EXPECT_FALSE(c.in_buffer(t));
        EXPECT_NE(t, c.root());
      }
    }
    // legality does not police CONT adjacency, but heads stay unique and in range
    std::set<int> dependents;
    for (const auto& a : c.arcs()) {
      EXPECT_TRUE(dependents.insert(a.dependent).second);
      EXPECT_NE(a.head, a.dependent);
      EXPECT_TRUE(a.head >= 1 && a.head <= n + 1);
      EXPECT_TRUE(a.dependent >= 1 && a.dependent <= n);
    }
  }
}
