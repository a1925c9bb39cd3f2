#pragma once

// Reference implementations used only by tests. They share no code with the
// library beyond its data types.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "nlkit/chunker.hpp"
#include "nlkit/grammar.hpp"
#include "nlkit/text.hpp"

namespace oracle {

// Every tree deriving exactly `tokens` from the start symbol, by exhaustive
// recursive search over split points. Requires an acyclic grammar without
// empty right-hand sides.
std::set<nlkit::Tree> all_parses(const nlkit::Grammar& g, const nlkit::Sentence& tokens);

// Product of rule probabilities, looked up by linear search.
double tree_prob(const nlkit::PcfgGrammar& g, const nlkit::Tree& t);

// Highest probability over all_parses, or 0 when there is no parse.
double best_prob(const nlkit::PcfgGrammar& g, const nlkit::Sentence& tokens);

// Backtracking matcher for the automaton regex syntax: single characters,
// `|`, `*`, `+`, `?`, parentheses and `\x` escapes.
bool regex_matches(const std::string& regex, const std::string& input);

// Every string over `alphabet` of length at most `max_len`, shortest first.
std::vector<std::string> all_strings(const std::set<char>& alphabet, std::size_t max_len);

struct ChunkCounts {
  std::size_t correct = 0, guessed = 0, gold = 0, missed = 0, incorrect = 0;
};
// Set intersection over (sentence, start, end) triples.
ChunkCounts count_chunks(const std::vector<nlkit::ChunkStructure>& gold,
                         const std::vector<nlkit::ChunkStructure>& test);

// Random acyclic grammar over nonterminals S, A, B, C and terminals a, b, c
// with at most `max_productions` productions, every nonterminal reachable
// and productive.
nlkit::Grammar random_grammar(std::mt19937& rng, std::size_t max_productions = 12);

// Random PCFG on the same shape as random_grammar.
nlkit::PcfgGrammar random_pcfg(std::mt19937& rng, std::size_t max_productions = 12);

// A sentence of at most `max_len` tokens, derived from the start symbol when
// possible, otherwise random words from the vocabulary.
nlkit::Sentence random_sentence(std::mt19937& rng, const nlkit::Grammar& g, std::size_t max_len = 6);

}  // namespace oracle
