#include <random>

#include "doctest.h"
#include "nlkit/text.hpp"

using namespace nlkit;

namespace {

// Reference split on runs of spaces, tabs and newlines.
std::vector<std::string> reference_split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

TaggedToken tok(std::string text, std::size_t k) { return TaggedToken{std::move(text), std::nullopt, {k, k + 1, {}}}; }

}  // namespace

TEST_CASE("tokenize_whitespace splits on whitespace runs with token positions") {
  const auto t = tokenize_whitespace("the dog barks", "doc1");
  REQUIRE(t.size() == 3);
  CHECK(t[0].text == "the");
  CHECK(t[1].loc.start == 1);
  CHECK(t[1].loc.end == 2);
  CHECK(t[2].loc.source == std::optional<std::string>("doc1"));
  CHECK_FALSE(t[0].tag.has_value());
  CHECK(tokenize_whitespace("").empty());

  const auto u = tokenize_whitespace("  a  b ");
  REQUIRE(u.size() == 2);
  CHECK(u[0].text == "a");
  CHECK(u[1].text == "b");
  CHECK(u[1].loc.start == 1);
}

TEST_CASE("tokenize_whitespace agrees with a reference split and is idempotent") {
  std::mt19937 rng(7);
  const std::string alphabet = "ab \t\n";
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    for (int k = std::uniform_int_distribution<int>(0, 12)(rng); k > 0; --k)
      s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    const auto toks = tokenize_whitespace(s);
    CHECK(words_of(toks) == reference_split(s));
    std::string joined;
    for (const auto& w : words_of(toks)) joined += (joined.empty() ? "" : " ") + w;
    CHECK(tokenize_whitespace(joined) == toks);
  }
}

TEST_CASE("read_tagged splits on the last slash") {
  const auto t = read_tagged("the/DT dog/NN");
  REQUIRE(t.size() == 2);
  CHECK(t[0].text == "the");
  CHECK(t[0].tag == std::optional<std::string>("DT"));
  CHECK(t[1].tag == std::optional<std::string>("NN"));

  const auto f = read_tagged("1/2/CD");
  REQUIRE(f.size() == 1);
  CHECK(f[0].text == "1/2");
  CHECK(f[0].tag == std::optional<std::string>("CD"));
}

TEST_CASE("read_tagged reports the position of a malformed item") {
  try {
    read_tagged("dog");
    FAIL("expected MalformedTaggedItem");
  } catch (const MalformedTaggedItem& e) {
    CHECK(e.position() == 0);
  }
  try {
    read_tagged("the/DT dog");
    FAIL("expected MalformedTaggedItem");
  } catch (const MalformedTaggedItem& e) {
    CHECK(e.position() == 1);
  }
  CHECK_THROWS_AS(read_tagged("dog/"), MalformedTaggedItem);
  CHECK_THROWS_AS(read_tagged("/NN"), MalformedTaggedItem);
}

TEST_CASE("tagged text round-trips") {
  const std::string text = "the/DT old/JJ man/NN ,/, who/WP ``/`` left/VBD ''/'' ./.";
  const auto t = read_tagged(text);
  CHECK(format_tagged(t) == text);
  CHECK(read_tagged(format_tagged(t)) == t);
  CHECK(tags_of(t).front() == "DT");
  CHECK(untag(t)[0].tag == std::nullopt);
}

TEST_CASE("tree leaves and height") {
  const Tree t("S", {Tree("NP", {tok("the", 0), tok("dog", 1)}), Tree("VP", {tok("barks", 2)})});
  CHECK(words_of(tree_leaves(t)) == std::vector<std::string>{"the", "dog", "barks"});
  CHECK(leaves_contiguous(t));
  CHECK(tree_height(t) == 3);

  const Tree single("S", {tok("x", 0)});
  CHECK(words_of(tree_leaves(single)) == std::vector<std::string>{"x"});

  const Tree chain("S", {Tree("NP", {Tree("N", {tok("dog", 0)})})});
  CHECK(words_of(tree_leaves(chain)) == std::vector<std::string>{"dog"});
  CHECK(tree_height(chain) == 4);

  CHECK(tree_height(Tree::Child(tok("dog", 0))) == 1);
  CHECK(tree_height(Tree("S", {Tree("NP", {tok("dog", 0)})})) == 3);
  CHECK(tree_height(Tree("S")) == 1);
}

TEST_CASE("leaves_contiguous rejects gaps") {
  const Tree gap("S", {tok("a", 0), tok("b", 2)});
  CHECK_FALSE(leaves_contiguous(gap));
}

TEST_CASE("location overlap") {
  const Location a{0, 2, {}}, b{2, 3, {}}, c{1, 3, {}};
  CHECK_FALSE(a.overlaps(b));
  CHECK(a.overlaps(c));
  CHECK(b.overlaps(c));
}

TEST_CASE("bracketed rendering") {
  const Tree t("S", {Tree("NP", {tok("I", 0)}), Tree("VP", {Placeholder{"V"}})});
  CHECK(to_bracketed(t) == "(S (NP I) (VP V?))");
  const auto tagged = read_tagged("I/PRP");
  CHECK(to_bracketed(Tree("NP", {tagged[0]}), true) == "(NP I/PRP)");
}
