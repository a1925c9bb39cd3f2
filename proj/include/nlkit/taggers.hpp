#pragma once

#include <memory>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nlkit/probability.hpp"
#include "nlkit/text.hpp"

namespace nlkit {

// Tag assigned when a backoff chain ends without an answer.
inline constexpr std::string_view kUnknownTag = "UNK";

struct DefaultTagger {
  std::string tag;
};

struct RegexpRule {
  std::string pattern;
  std::string tag;
};

// First rule whose pattern matches at the start of the word wins.
class RegexpTagger {
 public:
  explicit RegexpTagger(std::vector<RegexpRule> rules);
  const std::vector<RegexpRule>& rules() const { return rules_; }
  std::optional<std::string> choose(const std::string& word) const;

 private:
  std::vector<RegexpRule> rules_;
  std::vector<std::regex> compiled_;
};

// Most frequent training tag per word.
struct UnigramTagger {
  CondFreqDist table;
};

// A tagger and the chain it defers to. Taggers are immutable and share
// their backoff, so chains are finite and acyclic by construction.
class Tagger {
 public:
  using Kind = std::variant<DefaultTagger, RegexpTagger, UnigramTagger>;

  explicit Tagger(Kind kind, std::shared_ptr<const Tagger> backoff = nullptr)
      : kind_(std::move(kind)), backoff_(std::move(backoff)) {}

  const Kind& kind() const { return kind_; }
  const std::shared_ptr<const Tagger>& backoff() const { return backoff_; }

  // Returns a copy of this tagger deferring to `backoff`.
  Tagger with_backoff(std::shared_ptr<const Tagger> backoff) const { return Tagger(kind_, std::move(backoff)); }

  std::string tag_word(const std::string& word) const;

 private:
  std::optional<std::string> choose(const std::string& word) const;

  Kind kind_;
  std::shared_ptr<const Tagger> backoff_;
};

using TaggedCorpus = std::vector<Sentence>;

// Counts word→tag pairs; tokens without a tag are skipped. Throws
// EmptyCorpus when no tagged token is seen.
Tagger train_unigram(std::span<const Sentence> corpus, std::shared_ptr<const Tagger> backoff = nullptr);

// Same tokens with tags assigned; text and order untouched.
Sentence tag(const Tagger& t, std::span<const TaggedToken> tokens);

// Fraction of gold tokens whose assigned tag equals the gold tag.
double evaluate_tagger(const Tagger& t, std::span<const Sentence> gold);

// One sentence per non-blank line of word/TAG items.
TaggedCorpus read_tagged_corpus(std::string_view text);

// Regexp tagger rules file: JSON array of {"pattern", "tag"}.
std::vector<RegexpRule> regexp_rules_from_json(const nlohmann::json& j);

// Model files: {"kind": "default"|"regexp"|"unigram", ..., "backoff": {...}}.
nlohmann::json tagger_to_json(const Tagger& t);
Tagger tagger_from_json(const nlohmann::json& j);

}  // namespace nlkit
