#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nlkit/errors.hpp"

namespace nlkit {

using StateId = std::size_t;

struct Transition {
  StateId from = 0;
  std::optional<char> symbol;  // nullopt is an epsilon move
  StateId to = 0;
  friend bool operator==(const Transition&, const Transition&) = default;
  friend auto operator<=>(const Transition&, const Transition&) = default;
};

struct AutomatonData {
  std::size_t num_states = 0;  // states are 0 .. num_states-1
  std::set<char> alphabet;
  std::vector<Transition> transitions;
  StateId start = 0;
  std::set<StateId> finals;
};

class Nfa {
 public:
  // Throws FormatError if start, finals or transition endpoints are not states.
  explicit Nfa(AutomatonData data);

  const AutomatonData& data() const { return data_; }
  std::size_t num_states() const { return data_.num_states; }
  const std::set<char>& alphabet() const { return data_.alphabet; }
  StateId start() const { return data_.start; }
  const std::set<StateId>& finals() const { return data_.finals; }

  std::set<StateId> epsilon_closure(std::set<StateId> states) const;
  // States reachable by one `symbol` move (no closure).
  std::set<StateId> move(const std::set<StateId>& states, char symbol) const;

 private:
  AutomatonData data_;
  std::vector<std::vector<std::size_t>> outgoing_;  // transition indices by source
};

class Dfa {
 public:
  // Throws FormatError if the data is not a valid automaton, has epsilon
  // moves, or has two transitions for one (state, symbol).
  explicit Dfa(AutomatonData data, std::vector<std::set<StateId>> labels = {});

  const AutomatonData& data() const { return data_; }
  std::size_t num_states() const { return data_.num_states; }
  StateId start() const { return data_.start; }
  bool is_final(StateId s) const { return data_.finals.count(s) > 0; }
  std::optional<StateId> next(StateId s, char symbol) const;

  // For a DFA built by subset construction, the NFA states behind each
  // DFA state; empty otherwise.
  const std::vector<std::set<StateId>>& labels() const { return labels_; }

  Nfa as_nfa() const { return Nfa(data_); }

 private:
  AutomatonData data_;
  std::map<std::pair<StateId, char>, StateId> delta_;
  std::vector<std::set<StateId>> labels_;
};

// True if no epsilon moves and at most one move per (state, symbol).
bool is_deterministic(const AutomatonData& data);

// Thompson construction. Syntax: single-character symbols, `|`, `*`, `+`,
// `?`, parentheses, and `\x` for a literal x. Throws RegexSyntax with the
// 0-based offset where parsing failed.
Nfa regex_to_nfa(std::string_view regex);

// Subset construction over epsilon closures. Two subsets are the same DFA
// state when they agree on their important NFA states (those with a symbol
// move, plus accepting states); this preserves the language and avoids
// states that differ only in epsilon-only members. Only reachable,
// non-empty subsets are emitted, in breadth-first order over the sorted
// alphabet; no minimization.
Dfa nfa_to_dfa(const Nfa& n);

struct SimStep {
  std::size_t position = 0;
  std::set<StateId> active;
  friend bool operator==(const SimStep&, const SimStep&) = default;
};

struct SimResult {
  bool accepted = false;
  std::vector<SimStep> trace;  // stops at the first empty state set
};

SimResult simulate(const Nfa& m, std::string_view input);
SimResult simulate(const Dfa& m, std::string_view input);

// {"states": [...], "alphabet": [...], "transitions": [{"from", "symbol", "to"}],
//  "start": s, "finals": [...]}; a null symbol is an epsilon move.
nlohmann::json automaton_to_json(const AutomatonData& data);
AutomatonData automaton_from_json(const nlohmann::json& j);

}  // namespace nlkit
