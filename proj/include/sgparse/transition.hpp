#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgparse/errors.hpp"
#include "sgparse/scene_graph.hpp"
#include "sgparse/text.hpp"

namespace sgparse {

enum class ActionKind { Shift, Reduce, Left, Right };

struct Action {
  ActionKind kind = ActionKind::Shift;
  EdgeLabel label = EdgeLabel::Attr;  // meaningful for Left/Right only

  static Action shift() { return {ActionKind::Shift, EdgeLabel::Attr}; }
  static Action reduce() { return {ActionKind::Reduce, EdgeLabel::Attr}; }
  static Action left(EdgeLabel l) { return {ActionKind::Left, l}; }
  static Action right(EdgeLabel l) { return {ActionKind::Right, l}; }

  bool is_arc() const { return kind == ActionKind::Left || kind == ActionKind::Right; }

  friend bool operator==(const Action& a, const Action& b) {
    return a.kind == b.kind && (!a.is_arc() || a.label == b.label);
  }
};

inline std::string to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::Shift: return "SHIFT";
    case ActionKind::Reduce: return "REDUCE";
    case ActionKind::Left: return "LEFT(" + std::string(to_string(a.label)) + ")";
    case ActionKind::Right: return "RIGHT(" + std::string(to_string(a.label)) + ")";
  }
  return "?";
}

inline std::optional<Action> parse_action(std::string_view s) {
  if (s == "SHIFT") return Action::shift();
  if (s == "REDUCE") return Action::reduce();
  for (auto [prefix, kind] : {std::pair{std::string_view("LEFT("), ActionKind::Left},
                              std::pair{std::string_view("RIGHT("), ActionKind::Right}}) {
    if (s.starts_with(prefix) && s.ends_with(")")) {
      auto l = parse_edge_label(s.substr(prefix.size(), s.size() - prefix.size() - 1));
      if (l) return Action{kind, *l};
    }
  }
  return std::nullopt;
}

// The fixed, ordered action set of the parser. CONT exists only in the
// direction of the arc rule; BEGN only as LEFT (ROOT is buffer-final).
// Positions in this list are the output units of the scorer.
class ActionInventory {
 public:
  explicit ActionInventory(ArcRule rule = ArcRule::LeftArc) : rule_(rule) {
    actions_ = {Action::shift(),
                Action::reduce(),
                Action::left(EdgeLabel::Attr),
                Action::left(EdgeLabel::Subj),
                Action::left(EdgeLabel::Objt),
                rule == ArcRule::LeftArc ? Action::left(EdgeLabel::Cont) : Action::right(EdgeLabel::Cont),
                Action::left(EdgeLabel::Begn),
                Action::right(EdgeLabel::Attr),
                Action::right(EdgeLabel::Subj),
                Action::right(EdgeLabel::Objt)};
  }

  ArcRule rule() const { return rule_; }
  std::size_t size() const { return actions_.size(); }
  const Action& operator[](std::size_t i) const { return actions_[i]; }
  auto begin() const { return actions_.begin(); }
  auto end() const { return actions_.end(); }

  std::optional<std::size_t> index_of(const Action& a) const {
    auto it = std::find(actions_.begin(), actions_.end(), a);
    if (it == actions_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - actions_.begin());
  }

 private:
  ArcRule rule_;
  std::vector<Action> actions_;
};

// Parser state. The buffer is always the suffix [front .. n, ROOT] of the
// sentence, so only its front position is stored.
class Configuration {
 public:
  Configuration() = default;

  static Configuration initial(int n_tokens) {
    if (n_tokens < 0) throw ContractViolation("negative sentence length");
    Configuration c;
    c.n_ = n_tokens;
    c.front_ = 1;
    c.arcs_ = ArcSet(n_tokens);
    return c;
  }

  int n_tokens() const { return n_; }
  int root() const { return n_ + 1; }
  const std::vector<int>& stack() const { return stack_; }
  int buffer_front() const { return front_; }
  const ArcSet& arcs() const { return arcs_; }

  std::vector<int> buffer() const {
    std::vector<int> out;
    for (int t = front_; t <= root(); ++t) out.push_back(t);
    return out;
  }

  bool on_stack(int t) const { return std::find(stack_.begin(), stack_.end(), t) != stack_.end(); }
  bool in_buffer(int t) const { return t >= front_ && t <= root(); }

  // Stack element `depth` positions below the top (0 = top).
  std::optional<int> stack_at(std::size_t depth) const {
    if (depth >= stack_.size()) return std::nullopt;
    return stack_[stack_.size() - 1 - depth];
  }

  bool is_terminal() const { return stack_.empty() && front_ == root(); }

  bool is_legal(const Action& a) const {
    switch (a.kind) {
      case ActionKind::Shift: return front_ != root();
      case ActionKind::Reduce: return !stack_.empty();
      case ActionKind::Left:
        if (stack_.empty()) return false;
        return (a.label == EdgeLabel::Begn) == (front_ == root());
      case ActionKind::Right: return stack_.size() >= 2 && a.label != EdgeLabel::Begn;
    }
    return false;
  }

  Configuration apply(const Action& a) const {
    if (!is_legal(a)) {
      throw PreconditionViolation("illegal action " + to_string(a) + " with stack size " +
                                  std::to_string(stack_.size()) + " and buffer front " + std::to_string(front_) +
                                  (front_ == root() ? " (ROOT)" : ""));
    }
    Configuration next = *this;
    switch (a.kind) {
      case ActionKind::Shift:
        next.stack_.push_back(next.front_++);
        break;
      case ActionKind::Reduce:
        next.stack_.pop_back();
        break;
      case ActionKind::Left:
        next.arcs_.insert({front_, stack_.back(), a.label});
        next.stack_.pop_back();
        break;
      case ActionKind::Right:
        next.arcs_.insert({stack_[stack_.size() - 2], stack_.back(), a.label});
        next.stack_.pop_back();
        break;
    }
    return next;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  int n_ = 0;
  std::vector<int> stack_;
  int front_ = 1;
  ArcSet arcs_;
};

inline Configuration initial(int n_tokens) { return Configuration::initial(n_tokens); }

inline std::vector<Action> legal_actions(const Configuration& c, const ActionInventory& inventory) {
  std::vector<Action> out;
  for (const auto& a : inventory) {
    if (c.is_legal(a)) out.push_back(a);
  }
  return out;
}

inline Configuration apply(const Configuration& c, const Action& a) { return c.apply(a); }
inline bool is_terminal(const Configuration& c) { return c.is_terminal(); }

// Could the arc (head, dep) still be built from `c`? The buffer can only
// feed the stack, and two stacked tokens can only be linked when the head
// sits directly beneath the dependent.
inline bool arc_reachable(const Configuration& c, int head, int dep) {
  const bool dep_buffered = c.in_buffer(dep) && dep != c.root();
  if (dep_buffered) return head == c.root() || c.in_buffer(head) || c.on_stack(head);
  const auto& st = c.stack();
  auto it = std::find(st.begin(), st.end(), dep);
  if (it == st.end()) return false;
  if (head == c.root() || c.in_buffer(head)) return true;
  return it != st.begin() && *(it - 1) == head;
}

// Zero-cost actions at `c`. An arc action is zero-cost iff it builds a gold
// arc (label included) and every pending gold arc that was reachable stays
// reachable; REDUCE iff the stack top is in reduce_set, in which case it is
// the only correct action.
inline std::vector<Action> oracle(const Configuration& c, const ArcSet& gold, const std::set<int>& reduce_set,
                                  const ActionInventory& inventory) {
  if (auto top = c.stack_at(0); top && reduce_set.contains(*top)) return {Action::reduce()};

  std::vector<Arc> pending;
  for (const auto& a : gold) {
    if (!c.arcs().contains(a) && arc_reachable(c, a.head, a.dependent)) pending.push_back(a);
  }

  std::vector<Action> out;
  for (const auto& a : legal_actions(c, inventory)) {
    if (a.kind == ActionKind::Reduce) continue;
    const Configuration next = c.apply(a);
    if (a.is_arc()) {
      const int head = a.kind == ActionKind::Left ? c.buffer_front() : *c.stack_at(1);
      if (!gold.contains({head, *c.stack_at(0), a.label})) continue;
    }
    const bool keeps_all = std::all_of(pending.begin(), pending.end(), [&](const Arc& g) {
      return next.arcs().contains(g) || arc_reachable(next, g.head, g.dependent);
    });
    if (keeps_all) out.push_back(a);
  }
  if (out.empty()) {
    throw OracleStuck("no zero-cost action with stack size " + std::to_string(c.stack().size()) +
                      " and buffer front " + std::to_string(c.buffer_front()));
  }
  return out;
}

// The deterministic pick from a set of correct actions:
// LEFT > RIGHT > REDUCE > SHIFT.
inline Action preferred_action(const std::vector<Action>& correct) {
  for (auto kind : {ActionKind::Left, ActionKind::Right, ActionKind::Reduce, ActionKind::Shift}) {
    for (const auto& a : correct) {
      if (a.kind == kind) return a;
    }
  }
  throw ContractViolation("empty set of correct actions");
}

inline std::vector<Action> oracle_parse(int n_tokens, const ArcSet& gold, const std::set<int>& reduce_set,
                                        const ActionInventory& inventory) {
  std::vector<Action> seq;
  Configuration c = initial(n_tokens);
  while (!c.is_terminal()) {
    const Action a = preferred_action(oracle(c, gold, reduce_set, inventory));
    seq.push_back(a);
    c = c.apply(a);
  }
  return seq;
}

inline Configuration run_actions(int n_tokens, const std::vector<Action>& actions) {
  Configuration c = initial(n_tokens);
  for (const auto& a : actions) c = c.apply(a);
  return c;
}

// One line per step: `step<TAB>stack words<TAB>buffer words<TAB>action`.
// The last line shows the terminal state with an empty action field.
inline std::string format_trace(const Tokens& tokens, const std::vector<Action>& actions) {
  auto word = [&](int t) {
    return t == static_cast<int>(tokens.size()) + 1 ? std::string("ROOT") : tokens[static_cast<std::size_t>(t - 1)];
  };
  auto words = [&](const std::vector<int>& ids) {
    Tokens w;
    for (int t : ids) w.push_back(word(t));
    return join(w);
  };
  std::string out;
  Configuration c = initial(static_cast<int>(tokens.size()));
  for (std::size_t i = 0; i <= actions.size(); ++i) {
    out += std::to_string(i) + "\t" + words(c.stack()) + "\t" + words(c.buffer()) + "\t";
    if (i < actions.size()) {
      out += to_string(actions[i]);
      c = c.apply(actions[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace sgparse
