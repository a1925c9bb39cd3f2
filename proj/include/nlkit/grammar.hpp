#pragma once

// Context-free and probabilistic context-free grammars.
//
// Text format, one production per line:
//
//   # comment
//   S  -> NP VP
//   NP -> 'I' | 'dogs'
//   VP -> 'eats' NP            (mixed right-hand sides are allowed)
//
// Quoted symbols ('w' or "w") are terminals, bare symbols nonterminals. The
// first left-hand side is the start symbol. A PCFG file suffixes every
// alternative with its probability: `A -> 'a' [0.3] | 'b' [0.7]`.

#include <compare>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlkit/text.hpp"

namespace nlkit {

struct Symbol {
  std::string name;
  bool terminal = false;

  static Symbol nt(std::string n) { return {std::move(n), false}; }
  static Symbol term(std::string n) { return {std::move(n), true}; }

  // Grammar-file spelling: terminals quoted, nonterminals bare.
  std::string str() const;

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

struct Production {
  std::string lhs;
  std::vector<Symbol> rhs;

  // Every rhs symbol is a terminal.
  bool is_lexical() const;
  bool has_terminal() const;
  std::string str() const;  // `A -> B 'c'`

  friend bool operator==(const Production&, const Production&) = default;
  friend auto operator<=>(const Production&, const Production&) = default;
};

class Grammar {
 public:
  Grammar(std::string start, std::vector<Production> productions);

  const std::string& start() const { return start_; }
  const std::vector<Production>& productions() const { return productions_; }

  bool is_nonterminal(std::string_view name) const;
  // Indices into productions() with the given lhs, in file order.
  const std::vector<std::size_t>& expansions(const std::string& lhs) const;
  // Terminal words appearing anywhere on a right-hand side.
  const std::set<std::string>& vocabulary() const { return vocabulary_; }

  // Throws CyclicGrammar if some nonterminal derives itself through unary
  // nonterminal productions (A -> B, B -> A). Such grammars have infinitely
  // many derivations of a sentence.
  void require_acyclic() const;

  friend bool operator==(const Grammar& a, const Grammar& b);

 private:
  std::string start_;
  std::vector<Production> productions_;
  std::vector<std::string> nonterminals_;  // sorted
  std::vector<std::vector<std::size_t>> by_lhs_;
  std::set<std::string> vocabulary_;
};

struct WeightedProduction {
  Production production;
  double prob = 1.0;
};

class PcfgGrammar {
 public:
  // Validates that each lhs sums to 1 within kNormalizationTolerance.
  PcfgGrammar(std::string start, std::vector<WeightedProduction> productions);

  static constexpr double kNormalizationTolerance = 1e-6;

  const std::string& start() const { return cfg_.start(); }
  const std::vector<WeightedProduction>& productions() const { return productions_; }
  // The underlying grammar, with productions in the same order.
  const Grammar& cfg() const { return cfg_; }
  double prob(std::size_t production_index) const { return productions_[production_index].prob; }
  // Index of a production, or npos.
  std::size_t find(const Production& p) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<WeightedProduction> productions_;
  Grammar cfg_;
};

Grammar parse_cfg(std::string_view text);
PcfgGrammar parse_pcfg(std::string_view text);

// Writes one production per line; parse_cfg(format_cfg(g)) == g.
std::string format_cfg(const Grammar& g);
std::string format_pcfg(const PcfgGrammar& g);

// Token texts for which no terminal exists in the grammar.
std::set<std::string> check_coverage(const Grammar& g, std::span<const TaggedToken> tokens);

}  // namespace nlkit
