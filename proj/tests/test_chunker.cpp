#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nlkit/chunker.hpp"
#include "nlkit/errors.hpp"
#include "oracles.hpp"

using namespace nlkit;

namespace {

ChunkStructure make(const std::vector<std::string>& tags, std::vector<Span> chunks = {}) {
  ChunkStructure cs;
  for (std::size_t i = 0; i < tags.size(); ++i)
    cs.tokens.push_back({"w" + std::to_string(i), tags[i], {i, i + 1, std::nullopt}});
  cs.chunks = std::move(chunks);
  return cs;
}

std::vector<ChunkRuleSpec> load_cascade(const std::string& name) {
  std::ifstream in(std::string(NLKIT_DATA_DIR) + "/cascades/" + name);
  REQUIRE(in);
  return cascade_from_json(nlohmann::json::parse(in));
}

const std::vector<std::string> kTags = {"DT", "NN", "NNS", "JJ", "VBD", "VBZ", "IN", ",", ".", "CD"};
const std::vector<std::string> kPatterns = {"<DT>", "<NN.*>", "<NN.*>+", "<DT>?<JJ>*<NN.*>+", "<.*>+", "<.*>",
                                            "<VB.*>", "<IN|,|\\.>+", "<DT|JJ>*", "<CD><NNS>"};

ChunkRuleSpec random_rule(std::mt19937& rng) {
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_int_distribution<std::size_t> pat(0, kPatterns.size() - 1);
  const auto k = static_cast<ChunkRuleKind>(kind(rng));
  ChunkRuleSpec r{k, {kPatterns[pat(rng)]}, ""};
  if (k == ChunkRuleKind::Merge || k == ChunkRuleKind::Split) r.patterns.push_back(kPatterns[pat(rng)]);
  return r;
}

ChunkStructure random_structure(std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> len(0, 9), tag(0, kTags.size() - 1);
  std::vector<std::string> tags(len(rng));
  for (auto& t : tags) t = kTags[tag(rng)];
  auto cs = make(tags);
  std::bernoulli_distribution coin(0.4);
  std::size_t i = 0;
  while (i < tags.size()) {
    std::uniform_int_distribution<std::size_t> w(1, tags.size() - i);
    const auto width = w(rng);
    if (coin(rng)) cs.chunks.push_back({i, i + width});
    i += width;
  }
  return cs;
}

}  // namespace

TEST_CASE("tag patterns") {
  const auto p = compile_tag_pattern("<NN.*>");
  const std::vector<std::string> nn{"NN"}, nns{"NNS"}, dt{"DT"}, two{"NN", "NN"};
  CHECK(p.matches(nn));
  CHECK(p.matches(nns));
  CHECK_FALSE(p.matches(dt));
  CHECK_FALSE(p.matches(two));
  CHECK(compile_tag_pattern("<NN.*>+").matches(two));
  CHECK(compile_tag_pattern("<.*>").matches(std::vector<std::string>{","}));
  CHECK_FALSE(compile_tag_pattern("<.*>").matches(two));
  CHECK(compile_tag_pattern("<DT>\n  <NN>").matches(std::vector<std::string>{"DT", "NN"}));
  CHECK_THROWS_AS(compile_tag_pattern("<NN"), PatternSyntax);
  CHECK_THROWS_AS(compile_tag_pattern("NN>"), PatternSyntax);
  CHECK_THROWS_AS(compile_tag_pattern("<<NN>>"), PatternSyntax);
  CHECK_THROWS_AS(compile_tag_pattern("<>"), PatternSyntax);
  CHECK_THROWS_AS(compile_tag_pattern("<NN(>"), PatternSyntax);
  CHECK(encode_tags(two) == "<NN><NN>");
}

TEST_CASE("rule kinds and cascade JSON") {
  for (auto k : {ChunkRuleKind::Chunk, ChunkRuleKind::Chink, ChunkRuleKind::UnChunk, ChunkRuleKind::Merge,
                 ChunkRuleKind::Split})
    CHECK(parse_chunk_rule_kind(chunk_rule_name(k)) == k);
  CHECK_THROWS_AS(parse_chunk_rule_kind("Chonk"), FormatError);
  CHECK_THROWS_AS(ChunkRule(ChunkRuleSpec{ChunkRuleKind::Merge, {"<DT>"}, ""}), FormatError);
  CHECK_THROWS_AS(ChunkRule(ChunkRuleSpec{ChunkRuleKind::Chunk, {"<DT>", "<NN>"}, ""}), FormatError);
  CHECK_THROWS_AS(cascade_from_json(nlohmann::json::parse(R"({"kind":"Chunk"})")), FormatError);
  for (const auto* name : {"student1.json", "student2.json", "student3.json"}) {
    const auto rules = load_cascade(name);
    CHECK_FALSE(rules.empty());
    CHECK_NOTHROW(compile_cascade(rules));
    CHECK(cascade_from_json(cascade_to_json(rules)) == rules);
  }
}

TEST_CASE("chunk and chink on cascade 3") {
  auto cs = make({"DT", "NN", "VBD", "DT", "NN"});
  cs = apply_chunk_rule(cs, {ChunkRuleKind::Chunk, {"<.*>+"}, ""});
  CHECK(cs.chunks == std::vector<Span>{{0, 5}});
  cs = apply_chunk_rule(cs, {ChunkRuleKind::Chink, {"<VB.*|IN|CC|R.*|MD|WRB|TO|.|,>+"}, ""});
  CHECK(cs.chunks == std::vector<Span>{{0, 2}, {3, 5}});

  const auto sent = parse_gold_line("the/DT cat/NN sat/VBD on/IN the/DT mat/NN");
  const auto out = apply_cascade(sent, load_cascade("student3.json"));
  CHECK(format_gold_line(out) == "[ the/DT cat/NN ] sat/VBD on/IN [ the/DT mat/NN ]");
}

TEST_CASE("chunk rule semantics") {
  const auto base = make({"DT", "NN", "NN", "VBD", "DT", "JJ", "NNS"});
  SUBCASE("chunk takes leftmost-longest matches in unchunked material") {
    auto cs = apply_chunk_rule(base, {ChunkRuleKind::Chunk, {"<NN.*>+"}, ""});
    CHECK(cs.chunks == std::vector<Span>{{1, 3}, {6, 7}});
    cs = apply_chunk_rule(cs, {ChunkRuleKind::Chunk, {"<DT>"}, ""});
    CHECK(cs.chunks == std::vector<Span>{{0, 1}, {1, 3}, {4, 5}, {6, 7}});
  }
  SUBCASE("empty matches make no chunk") {
    const auto cs = apply_chunk_rule(base, {ChunkRuleKind::Chunk, {"<DT|JJ>*"}, ""});
    CHECK(cs.chunks == std::vector<Span>{{0, 1}, {4, 6}});
  }
  SUBCASE("chink of a whole chunk deletes it") {
    const auto cs = apply_chunk_rule(make({"VBD", "DT", "NN"}, {{0, 1}, {1, 3}}), {ChunkRuleKind::Chink, {"<VBD>"}, ""});
    CHECK(cs.chunks == std::vector<Span>{{1, 3}});
  }
  SUBCASE("unchunk needs the whole content to match") {
    const auto cs = make({"VBD", "DT", "VBD", ","}, {{0, 1}, {1, 3}, {3, 4}});
    const auto out = apply_chunk_rule(cs, {ChunkRuleKind::UnChunk, {"<VBD|,>"}, ""});
    CHECK(out.chunks == std::vector<Span>{{1, 3}});
  }
  SUBCASE("merge cascades left to right") {
    const auto cs = make({"DT", "JJ", "NN", "VBD"}, {{0, 1}, {1, 2}, {2, 3}});
    const auto out = apply_chunk_rule(cs, {ChunkRuleKind::Merge, {"<DT|JJ>", "<JJ|NN>"}, ""});
    CHECK(out.chunks == std::vector<Span>{{0, 3}});
    const auto gap = make({"DT", "VBD", "NN"}, {{0, 1}, {2, 3}});
    CHECK(apply_chunk_rule(gap, {ChunkRuleKind::Merge, {"<DT>", "<NN>"}, ""}).chunks == gap.chunks);
  }
  SUBCASE("split") {
    const auto cs = make({"DT", "NN", "DT", "NN"}, {{0, 4}});
    CHECK(apply_chunk_rule(cs, {ChunkRuleKind::Split, {"<NN>", "<DT>"}, ""}).chunks ==
          std::vector<Span>{{0, 2}, {2, 4}});
    const auto three = make({"DT", "NN", "DT", "NN", "DT", "NN"}, {{0, 6}});
    CHECK(apply_chunk_rule(three, {ChunkRuleKind::Split, {"<NN>", "<DT>"}, ""}).chunks ==
          std::vector<Span>{{0, 2}, {2, 4}, {4, 6}});
  }
}

TEST_CASE("cascades on edge cases") {
  const auto cs = parse_gold_line("[ the/DT cat/NN ] sat/VBD");
  const std::vector<ChunkRuleSpec> none;
  CHECK(apply_cascade(cs, none) == cs);
  const auto commas = parse_gold_line(",/, ,/, ,/,");
  CHECK(apply_cascade(commas, load_cascade("student1.json")).chunks.empty());
  const auto empty = make({});
  CHECK(apply_cascade(empty, load_cascade("student2.json")).chunks.empty());
}

TEST_CASE("unchunk") {
  const auto gold = parse_gold_line("[ the/DT cat/NN ] sat/VBD on/IN [ the/DT mat/NN ]");
  REQUIRE(gold.chunks.size() == 2);
  const auto u = unchunk(gold);
  CHECK(u.chunks.empty());
  CHECK(u.tokens == gold.tokens);
  CHECK(unchunk(u) == u);
}

TEST_CASE("gold lines and chunk strings") {
  const auto cs = parse_gold_line("[ the/DT cat/NN ] sat/VBD [ 1/2/CD ]");
  CHECK(cs.chunks == std::vector<Span>{{0, 2}, {3, 4}});
  CHECK(cs.tokens[3].text == "1/2");
  CHECK(format_gold_line(cs) == "[ the/DT cat/NN ] sat/VBD [ 1/2/CD ]");
  CHECK(encode_chunk_string(cs) == "{<DT><NN>}<VBD>{<CD>}");
  CHECK(decode_chunk_string("{<DT><NN>}<VBD>{<CD>}", cs.tokens) == cs);
  CHECK_THROWS_AS(decode_chunk_string("{<DT><NN>}<VB>{<CD>}", cs.tokens), FormatError);
  CHECK_THROWS_AS(parse_gold_line("[ the/DT cat/NN"), FormatError);
  CHECK_THROWS_AS(parse_gold_line("[ [ the/DT ] ]"), FormatError);
  CHECK_THROWS_AS(parse_gold_line("[ ] the/DT"), FormatError);
  CHECK(read_gold_corpus("a/DT\n\n[ b/NN ]\n").size() == 2);
}

TEST_CASE("scoring") {
  const auto gold = make({"DT", "NN", "VBD", "DT", "NN"}, {{0, 2}, {3, 5}});
  const auto test = make({"DT", "NN", "VBD", "DT", "NN"}, {{0, 2}, {4, 5}});
  const auto s = score_chunks(gold, test);
  CHECK(s.precision() == 0.5);
  CHECK(s.recall() == 0.5);
  CHECK(s.f1() == 0.5);
  CHECK(s.missed == std::vector<SentenceSpan>{{0, {3, 5}}});
  CHECK(s.incorrect == std::vector<SentenceSpan>{{0, {4, 5}}});

  const auto same = score_chunks(gold, gold);
  CHECK(same.precision() == 1.0);
  CHECK(same.recall() == 1.0);
  CHECK(same.f1() == 1.0);

  const auto empty = score_chunks(gold, unchunk(gold));
  CHECK(empty.precision() == 1.0);
  CHECK(empty.recall() == 0.0);
  CHECK(empty.f1() == 0.0);

  CHECK(score_chunks(unchunk(gold), unchunk(gold)).f1() == 1.0);
  CHECK_THROWS_AS(score_chunks(gold, make({"DT", "NN"})), TokenMismatch);
  const std::vector<ChunkStructure> one{gold};
  CHECK_THROWS_AS(score_corpus(one, std::vector<ChunkStructure>{}), TokenMismatch);
}

TEST_CASE("corpus scoring matches the set oracle") {
  std::mt19937 rng(5);
  std::vector<ChunkStructure> gold, test;
  for (int i = 0; i < 50; ++i) {
    auto g = random_structure(rng);
    auto t = random_structure(rng);
    t.tokens = g.tokens;
    t.chunks.erase(std::remove_if(t.chunks.begin(), t.chunks.end(),
                                  [&](const Span& s) { return s.end > g.tokens.size(); }),
                   t.chunks.end());
    gold.push_back(g);
    test.push_back(t);
  }
  const auto s = score_corpus(gold, test);
  const auto o = oracle::count_chunks(gold, test);
  CHECK(s.correct == o.correct);
  CHECK(s.guessed == o.guessed);
  CHECK(s.gold == o.gold);
  CHECK(s.missed.size() == o.missed);
  CHECK(s.incorrect.size() == o.incorrect);
  const auto r = score_corpus(test, gold);
  CHECK(r.precision() == s.recall());
  CHECK(r.recall() == s.precision());
}

TEST_CASE("tag rates") {
  const auto corpus = read_gold_corpus(
      "[ the/DT cat/NN ] sat/VBD\n[ a/DT dog/NN ] ran/VBD\n[ the/DT mat/NN ]\nthe/DT end/NN\n");
  const auto rates = np_tag_rates(corpus);
  CHECK(rates.at("DT") == 0.75);
  CHECK(rates.at("NN") == 0.75);
  CHECK(rates.at("VBD") == 0.0);
  const auto rule = rule_from_tag_rates(rates, 0.5);
  CHECK(rule.kind == ChunkRuleKind::Chunk);
  CHECK(rule.patterns == std::vector<std::string>{"<DT|NN>*"});
  const auto none = rule_from_tag_rates(rates, 0.9);
  CHECK_NOTHROW(ChunkRule{none});
  CHECK(apply_chunk_rule(unchunk(corpus[0]), none).chunks.empty());
  CHECK(rule_from_tag_rates({{".", 1.0}, {"NN", 0.6}}, 0.5).patterns[0] == "<\\.|NN>*");
  CHECK_THROWS_AS(np_tag_rates(std::vector<ChunkStructure>{}), EmptyCorpus);
}

TEST_CASE("invariants hold across random cascades") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    auto cs = random_structure(rng);
    REQUIRE(cs.valid());
    const auto tokens = cs.tokens;
    std::uniform_int_distribution<int> len(1, 6);
    std::vector<ChunkRuleSpec> rules(len(rng));
    for (auto& r : rules) r = random_rule(rng);
    for (const auto& r : rules) {
      cs = apply_chunk_rule(cs, r);
      CHECK(cs.valid());
      CHECK(cs.tokens == tokens);
    }
    CHECK(decode_chunk_string(encode_chunk_string(cs), cs.tokens) == cs);
    CHECK(parse_gold_line(format_gold_line(cs)).chunks == cs.chunks);
  }
}

TEST_CASE("chunk then unchunk with the same pattern is the identity") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cs = unchunk(random_structure(rng));
    std::uniform_int_distribution<std::size_t> pat(0, kPatterns.size() - 1);
    const auto& p = kPatterns[pat(rng)];
    const auto chunked = apply_chunk_rule(cs, {ChunkRuleKind::Chunk, {p}, ""});
    CHECK(apply_chunk_rule(chunked, {ChunkRuleKind::UnChunk, {p}, ""}) == cs);
  }
}

TEST_CASE("score symmetry on random pairs") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_structure(rng);
    auto b = random_structure(rng);
    b.tokens = a.tokens;
    std::erase_if(b.chunks, [&](const Span& s) { return s.end > a.tokens.size(); });
    const auto ab = score_chunks(a, b), ba = score_chunks(b, a);
    CHECK(ab.precision() == ba.recall());
    CHECK(ab.recall() == ba.precision());
    CHECK(ab.f1() == ba.f1());
  }
}
