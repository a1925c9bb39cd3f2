#pragma once

// Chart parsing with explicit, individually applicable rules.
//
// An edge is a dotted production over a span of the sentence, plus the ids
// of the complete edges it has consumed. Because the children are part of
// an edge's identity, every distinct derivation of a constituent gets its
// own edge and all parse trees can be read straight off the chart.
//
// Lexical productions (all-terminal right-hand sides) enter the chart only
// through LexicalInsert, as complete edges over the tokens they match.
// Terminals inside mixed right-hand sides (VP -> 'eats' NP) are consumed
// from leaf edges: complete edges whose left-hand side is the token itself.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "nlkit/grammar.hpp"
#include "nlkit/text.hpp"

namespace nlkit {

using EdgeId = std::size_t;

enum class ChartRuleKind { TopDownInit, TopDownPredict, BottomUpPredict, Fundamental, LexicalInsert };

std::string_view rule_name(ChartRuleKind kind);
// Accepts the names produced by rule_name(); throws FormatError otherwise.
ChartRuleKind parse_rule_kind(std::string_view name);

struct Edge {
  std::size_t start = 0;
  std::size_t end = 0;
  Production production;  // for a leaf edge: lhs is the token, rhs is empty
  std::size_t dot = 0;
  std::vector<EdgeId> children;
  bool leaf = false;

  bool is_complete() const { return dot == production.rhs.size(); }
  // What this edge provides to the fundamental rule once complete.
  Symbol lhs_symbol() const { return {production.lhs, leaf}; }
  // Symbol right after the dot; requires !is_complete().
  const Symbol& next_symbol() const { return production.rhs[dot]; }

  // `[0,1] NP -> 'I' *`
  std::string str() const;

  auto key() const { return std::tie(start, end, production, dot, children, leaf); }
  friend bool operator==(const Edge& a, const Edge& b) { return a.key() == b.key(); }
};

class Chart {
 public:
  Chart() : Chart(Sentence{}) {}
  explicit Chart(Sentence tokens);

  std::size_t num_leaves() const { return tokens_.size(); }
  const Sentence& tokens() const { return tokens_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  const Edge& edge(EdgeId id) const;
  std::optional<EdgeId> find(const Edge& e) const;
  // Complete edges starting at a position, in insertion order.
  const std::vector<EdgeId>& complete_at(std::size_t start) const { return complete_by_start_[start]; }

  // Adds the edge unless present. Returns its id and whether it was new.
  std::pair<EdgeId, bool> insert(Edge e);

  // The chart as it was when it held only its first `count` edges.
  Chart truncated(std::size_t count) const;

 private:
  using Key = std::tuple<std::size_t, std::size_t, Production, std::size_t, std::vector<EdgeId>, bool>;

  Sentence tokens_;
  std::vector<Edge> edges_;
  std::map<Key, EdgeId> index_;
  std::vector<std::vector<EdgeId>> complete_by_start_;
};

struct Strategy {
  enum class Name { TopDown, BottomUp };
  Name name;
  std::vector<ChartRuleKind> ordering;

  static Strategy top_down();
  static Strategy bottom_up();
  static Strategy from_name(Name n) { return n == Name::TopDown ? top_down() : bottom_up(); }
};

std::string_view strategy_name(Strategy::Name n);
// Accepts `TopDown`/`td`/`top-down` and the bottom-up equivalents.
Strategy::Name parse_strategy_name(std::string_view name);

// Empty chart for the sentence. Throws UncoveredTokens when a token has no
// terminal in the grammar and CyclicGrammar for unary cycles.
Chart chart_init(const Grammar& g, Sentence tokens);

// Applies one rule everywhere it licenses a new edge, against the edges
// present when the call starts. With a selection, predict rules only fire
// from selected edges and the fundamental rule only on pairs that include a
// selected edge; TopDownInit and LexicalInsert ignore it. Returns the ids
// of the edges added, in order.
std::vector<EdgeId> apply_rule(Chart& c, const Grammar& g, ChartRuleKind kind,
                               const std::optional<std::set<EdgeId>>& selected = std::nullopt);

struct StepResult {
  ChartRuleKind rule;
  EdgeId edge;
};

// Adds exactly one edge: rules are tried in strategy order, each scanning
// edges in insertion order, and the first candidate not yet in the chart is
// added. Returns nothing at the fixpoint.
std::optional<StepResult> step(Chart& c, const Grammar& g, const Strategy& s);

// Steps until the fixpoint; returns the number of edges added.
std::size_t run_to_fixpoint(Chart& c, const Grammar& g, const Strategy& s);

// One tree per complete start-symbol edge spanning the whole sentence,
// sorted and without duplicates, so the result does not depend on the
// order in which edges were added.
std::vector<Tree> extract_parses(const Chart& c, const Grammar& g);

// Tree rooted at the edge: consumed children expanded, symbols after the dot
// as placeholders. A leaf edge yields a childless tree labelled by its token.
Tree tree_for_edge(const Chart& c, EdgeId id);

// Snapshot format shared by presets and the session API:
//   {"grammar": text, "tokens": [...],
//    "edges": [{"id","i","j","lhs","rhs","dot","children"}]}
// Terminals are quoted in lhs/rhs; a leaf edge has a quoted lhs and no rhs.
nlohmann::json chart_to_json(const Grammar& g, const Chart& c);
nlohmann::json edge_to_json(const Chart& c, EdgeId id);

struct ChartSnapshot {
  Grammar grammar;
  Chart chart;
};
// Validates every edge against the grammar and sentence; throws FormatError.
ChartSnapshot chart_from_json(const nlohmann::json& j);

}  // namespace nlkit
