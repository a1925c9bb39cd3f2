#pragma once

// Transformational regular-expression chunking.
//
// A tagged sentence is rendered as a tag string, one `<TAG>` unit per token,
// with chunks wrapped in braces: `{<DT><NN>}<VBD>{<DT><NN>}`. Tag patterns
// are regular expressions over that rendering; `<...>` delimits one tag and
// a `.` never matches `{`, `}`, `<` or `>`, so wildcards stay inside a tag.
//
// Rules are applied once, left to right, taking the longest match at each
// position and never overlapping matches:
//   Chunk(p)      each match of p inside unchunked material becomes a chunk
//   Chink(p)      matches of p inside a chunk are cut out of it
//   UnChunk(p)    chunks whose whole content matches p are dissolved
//   Merge(p1, p2) adjacent chunks merge when a suffix of the left one matches
//                 p1 and a prefix of the right one matches p2; merges cascade
//   Split(p1, p2) a chunk is cut where p1 matches just before and p2 just after
// Matches are never empty; a pattern such as `<DT>*` only produces chunks
// from its non-empty matches.

#include <compare>
#include <map>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nlkit/text.hpp"

namespace nlkit {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

class TagPattern {
 public:
  // Throws PatternSyntax for unbalanced or nested angle brackets, empty
  // `<>`, or an invalid regular expression.
  explicit TagPattern(std::string_view source);

  const std::string& source() const { return source_; }
  // The std::regex (ECMAScript) the pattern was compiled to.
  const std::string& regex_source() const { return regex_; }

  // True if the whole tag sequence matches.
  bool matches(std::span<const std::string> tags) const;
  // True if the tag string (as produced by encode_tags) matches entirely.
  bool matches_encoded(std::string_view encoded) const;

 private:
  std::string source_;
  std::string regex_;
  std::regex re_;
};

TagPattern compile_tag_pattern(std::string_view source);

// `<DT><NN>` for the tags given.
std::string encode_tags(std::span<const std::string> tags);

enum class ChunkRuleKind { Chunk, Chink, UnChunk, Merge, Split };

std::string_view chunk_rule_name(ChunkRuleKind kind);
ChunkRuleKind parse_chunk_rule_kind(std::string_view name);

struct ChunkRuleSpec {
  ChunkRuleKind kind;
  std::vector<std::string> patterns;
  std::string note;

  friend bool operator==(const ChunkRuleSpec&, const ChunkRuleSpec&) = default;
};

struct ChunkStructure {
  Sentence tokens;
  std::vector<Span> chunks;  // sorted, disjoint, non-empty, within [0, n]

  // Checks the chunk list invariant.
  bool valid() const;
  friend bool operator==(const ChunkStructure&, const ChunkStructure&) = default;
};

// A rule with its patterns compiled once, for reuse across a corpus.
class ChunkRule {
 public:
  explicit ChunkRule(ChunkRuleSpec spec);  // throws PatternSyntax, FormatError
  const ChunkRuleSpec& spec() const { return spec_; }
  ChunkStructure apply(const ChunkStructure& cs) const;

 private:
  ChunkRuleSpec spec_;
  std::vector<TagPattern> patterns_;
};

ChunkStructure apply_chunk_rule(const ChunkStructure& cs, const ChunkRuleSpec& rule);
ChunkStructure apply_cascade(const ChunkStructure& cs, std::span<const ChunkRuleSpec> rules);
ChunkStructure apply_cascade(const ChunkStructure& cs, std::span<const ChunkRule> rules);

std::vector<ChunkRule> compile_cascade(std::span<const ChunkRuleSpec> rules);

ChunkStructure unchunk(const ChunkStructure& gold);

// `{<DT><NN>}<VBD>` rendering and its inverse. Decoding checks the tags
// against `tokens` and throws FormatError on any mismatch.
std::string encode_chunk_string(const ChunkStructure& cs);
ChunkStructure decode_chunk_string(std::string_view encoded, const Sentence& tokens);

// Gold file lines: `[ the/DT cat/NN ] sat/VBD`.
ChunkStructure parse_gold_line(std::string_view line);
std::string format_gold_line(const ChunkStructure& cs);
std::vector<ChunkStructure> read_gold_corpus(std::string_view text);

struct SentenceSpan {
  std::size_t sentence = 0;
  Span span;
  friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
  friend auto operator<=>(const SentenceSpan&, const SentenceSpan&) = default;
};

struct ChunkScore {
  std::size_t correct = 0;  // |gold ∩ test|
  std::size_t guessed = 0;  // |test|
  std::size_t gold = 0;     // |gold|
  std::vector<SentenceSpan> missed;     // in gold, not in test
  std::vector<SentenceSpan> incorrect;  // in test, not in gold

  double precision() const;  // 1 when nothing was guessed
  double recall() const;     // 1 when there is no gold chunk
  double f1() const;         // 0 when precision + recall is 0
};

// Exact span matching. Throws TokenMismatch when the sentences differ.
ChunkScore score_chunks(const ChunkStructure& gold, const ChunkStructure& test);
// Micro-averaged over a corpus; spans carry their sentence index.
ChunkScore score_corpus(std::span<const ChunkStructure> gold, std::span<const ChunkStructure> test);

// Fraction of each tag's occurrences that fall inside a chunk.
std::map<std::string, double> np_tag_rates(std::span<const ChunkStructure> corpus);

// One Chunk rule over the alternation of tags whose rate exceeds the
// threshold, e.g. `<CD|DT|JJ|NN>*`. Tags are listed in lexicographic order
// with regex metacharacters escaped.
ChunkRuleSpec rule_from_tag_rates(const std::map<std::string, double>& rates, double threshold);

// Cascade files: JSON array of {"kind", "patterns", "note"}.
std::vector<ChunkRuleSpec> cascade_from_json(const nlohmann::json& j);
nlohmann::json cascade_to_json(std::span<const ChunkRuleSpec> rules);

}  // namespace nlkit
