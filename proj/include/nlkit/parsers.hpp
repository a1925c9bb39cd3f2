#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlkit/grammar.hpp"
#include "nlkit/text.hpp"

namespace nlkit {

// ---------------------------------------------------------------------------
// Shift-reduce

struct SrAction {
  enum class Kind { Shift, Reduce };
  Kind kind;
  std::string token;                     // Shift
  std::optional<Production> production;  // Reduce

  std::string str() const;  // `Shift I`, `Reduce NP -> 'I'`
};

struct SrTraceStep {
  SrAction action;
  std::vector<Tree::Child> stack_after;
  std::size_t remaining = 0;
};

struct SrResult {
  std::optional<Tree> tree;
  std::vector<SrTraceStep> trace;
};

// Greedy shift-reduce: after every action, reduce with the first production
// (in grammar order) whose right-hand side matches the top of the stack;
// shift only when nothing reduces. Incomplete by construction: it never
// backtracks, so some parseable sentences fail. Throws CyclicGrammar for
// grammars with unary cycles, which would reduce forever.
SrResult sr_parse(const Grammar& g, std::span<const TaggedToken> tokens);

// ---------------------------------------------------------------------------
// Probabilistic parsing

struct ScoredTree {
  Tree tree;
  double prob = 0.0;
};

class ProbabilisticParser {
 public:
  virtual ~ProbabilisticParser() = default;
  // Most probable parse, or nothing if the sentence is not in the language.
  virtual std::optional<ScoredTree> parse(std::span<const TaggedToken> tokens) const = 0;
};

// Viterbi search over dotted items (A -> α • β over a span), so right-hand
// sides of any length and mixed terminals are handled without converting
// to Chomsky normal form. Among parses whose probabilities agree to a
// relative 1e-12, the first found wins: productions are tried in grammar
// order and split points left to right.
class ViterbiParser final : public ProbabilisticParser {
 public:
  explicit ViterbiParser(PcfgGrammar grammar) : grammar_(std::move(grammar)) {}
  std::optional<ScoredTree> parse(std::span<const TaggedToken> tokens) const override;
  const PcfgGrammar& grammar() const { return grammar_; }

 private:
  PcfgGrammar grammar_;
};

std::optional<ScoredTree> viterbi_parse(const PcfgGrammar& g, std::span<const TaggedToken> tokens);

// Product of the probabilities of the productions used in the tree, taken
// in the same order as ViterbiParser so the two agree exactly. Throws
// UnknownProduction for a local tree the grammar does not have.
double tree_probability(const PcfgGrammar& g, const Tree& t);

}  // namespace nlkit
