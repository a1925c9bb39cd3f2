#include <cmath>
#include <random>

#include "doctest.h"
#include "nlkit/chart.hpp"
#include "nlkit/parsers.hpp"
#include "oracles.hpp"

using namespace nlkit;

TEST_CASE("shift-reduce on the toy grammar") {
  const auto g = parse_cfg("S -> NP VP\nNP -> 'I'\nVP -> 'sleep'");
  const auto r = sr_parse(g, tokenize_whitespace("I sleep"));
  REQUIRE(r.tree);
  CHECK(to_bracketed(*r.tree) == "(S (NP I) (VP sleep))");
  std::vector<std::string> actions;
  for (const auto& s : r.trace) actions.push_back(s.action.str());
  CHECK(actions == std::vector<std::string>{"Shift I", "Reduce NP -> 'I'", "Shift sleep", "Reduce VP -> 'sleep'",
                                            "Reduce S -> NP VP"});
  CHECK(r.trace[0].remaining == 1);
  CHECK(r.trace[2].stack_after.size() == 2);
  CHECK(r.trace.back().stack_after.size() == 1);
}

TEST_CASE("shift-reduce on empty input") {
  const auto g = parse_cfg("S -> 'a'");
  const auto r = sr_parse(g, Sentence{});
  CHECK_FALSE(r.tree);
  CHECK(r.trace.empty());
}

TEST_CASE("greedy shift-reduce misses a parse that exists") {
  const auto g = parse_cfg("S -> A B\nA -> 'a'\nB -> 'a' 'b'");
  const auto toks = tokenize_whitespace("a a b");
  const auto r = sr_parse(g, toks);
  CHECK_FALSE(r.tree);
  CHECK_FALSE(r.trace.empty());
  auto c = chart_init(g, toks);
  run_to_fixpoint(c, g, Strategy::bottom_up());
  CHECK(extract_parses(c, g).size() == 1);
}

TEST_CASE("shift-reduce success implies a chart parse") {
  std::mt19937 rng(99);
  int successes = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = oracle::random_grammar(rng);
    const auto toks = oracle::random_sentence(rng, g);
    const auto r = sr_parse(g, toks);
    if (!r.tree) continue;
    ++successes;
    CHECK(oracle::all_parses(g, toks).count(*r.tree) == 1);
  }
  CHECK(successes > 0);
  CHECK_THROWS_AS(sr_parse(parse_cfg("S -> A | 'a'\nA -> S"), tokenize_whitespace("a")), CyclicGrammar);
}

TEST_CASE("Viterbi on small PCFGs") {
  const auto g = parse_pcfg("S -> A A [1.0]\nA -> 'a' [0.4]\nA -> 'b' [0.6]");
  const auto best = viterbi_parse(g, tokenize_whitespace("a b"));
  REQUIRE(best);
  CHECK(std::abs(best->prob - 0.24) < 1e-15);
  CHECK(to_bracketed(best->tree) == "(S (A a) (A b))");
  CHECK(tree_probability(g, best->tree) == best->prob);
  CHECK_FALSE(viterbi_parse(g, tokenize_whitespace("a")));
  CHECK_FALSE(viterbi_parse(g, Sentence{}));

  const auto amb = parse_pcfg("S -> S S [0.3] | 'a' [0.7]");
  const auto p = viterbi_parse(amb, tokenize_whitespace("a a a"));
  REQUIRE(p);
  CHECK(std::abs(p->prob - 0.3 * 0.3 * 0.7 * 0.7 * 0.7) < 1e-15);
  CHECK(to_bracketed(p->tree) == "(S (S a) (S (S a) (S a)))");
  const ViterbiParser parser(amb);
  const ProbabilisticParser& base = parser;
  CHECK(base.parse(tokenize_whitespace("a a a"))->prob == p->prob);
}

TEST_CASE("tree_probability") {
  const auto g = parse_pcfg("S -> A A [1.0]\nA -> 'a' [0.4]\nA -> 'b' [0.6]");
  const auto toks = tokenize_whitespace("a b");
  CHECK(tree_probability(g, Tree("A", {toks[0]})) == doctest::Approx(0.4));
  CHECK(tree_probability(g, Tree("S", {Tree("A", {toks[0]}), Tree("A", {toks[1]})})) == doctest::Approx(0.24));
  try {
    tree_probability(g, Tree("S", {Tree("A", {toks[0]})}));
    FAIL("expected UnknownProduction");
  } catch (const UnknownProduction& e) {
    CHECK(e.node() == "S");
  }
}

TEST_CASE("Viterbi handles mixed and long right-hand sides and unary chains") {
  const auto g = parse_pcfg(
      "S -> NP VP [0.9] | VP [0.1]\nVP -> 'eats' NP [0.5] | V NP NP [0.2] | V [0.3]\n"
      "V -> 'gives' [0.6] | 'eats' [0.4]\nNP -> 'cats' [0.5] | 'fish' [0.3] | N [0.2]\nN -> 'cats' [1.0]");
  for (const auto* s : {"cats eats fish", "cats gives cats fish", "eats", "cats eats"}) {
    const auto toks = tokenize_whitespace(s);
    const auto best = viterbi_parse(g, toks);
    const auto expected = oracle::best_prob(g, toks);
    INFO(s);
    if (expected == 0.0) {
      CHECK_FALSE(best);
      continue;
    }
    REQUIRE(best);
    CHECK(std::abs(best->prob - expected) <= 1e-12);
    CHECK(tree_probability(g, best->tree) == best->prob);
  }
}

TEST_CASE("Viterbi matches brute force on random PCFGs") {
  std::mt19937 rng(31337);
  int parsed = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = oracle::random_pcfg(rng);
    const auto toks = oracle::random_sentence(rng, g.cfg());
    INFO(format_pcfg(g), format_tagged(toks));
    const auto best = viterbi_parse(g, toks);
    const auto expected = oracle::best_prob(g, toks);
    if (expected == 0.0) {
      CHECK_FALSE(best);
      continue;
    }
    ++parsed;
    REQUIRE(best);
    CHECK(std::abs(best->prob - expected) <= 1e-12);
    CHECK(tree_probability(g, best->tree) == best->prob);
    CHECK(oracle::all_parses(g.cfg(), toks).count(best->tree) == 1);
  }
  CHECK(parsed >= 20);
}
