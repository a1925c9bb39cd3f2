#pragma once

// Tokens, tagged tokens and trees: the atoms every pipeline in the toolkit
// passes around. Locations are token indices, not character offsets.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nlkit/errors.hpp"

namespace nlkit {

struct Location {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::optional<std::string> source;

  std::size_t length() const { return end - start; }
  bool overlaps(const Location& other) const {
    return !(end <= other.start || other.end <= start);
  }
  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;
};

struct TaggedToken {
  std::string text;
  std::optional<std::string> tag;
  Location loc;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
  friend auto operator<=>(const TaggedToken&, const TaggedToken&) = default;
};

using Sentence = std::vector<TaggedToken>;

// Unconsumed right-hand-side symbol in a partial tree (rendered `VP?`).
struct Placeholder {
  std::string symbol;
  friend bool operator==(const Placeholder&, const Placeholder&) = default;
  friend auto operator<=>(const Placeholder&, const Placeholder&) = default;
};

struct Tree {
  using Child = std::variant<Tree, TaggedToken, Placeholder>;

  std::string node;
  std::vector<Child> children;

  Tree() = default;
  explicit Tree(std::string label, std::vector<Child> kids = {})
      : node(std::move(label)), children(std::move(kids)) {}

  friend bool operator==(const Tree& a, const Tree& b);
  friend bool operator<(const Tree& a, const Tree& b);
};

Sentence tokenize_whitespace(std::string_view text,
                             std::optional<std::string> source = std::nullopt);

// Parses `word/TAG` items, splitting on the last slash.
Sentence read_tagged(std::string_view text);

// Renders tokens as `word/TAG` separated by single spaces; untagged tokens
// are written bare.
std::string format_tagged(std::span<const TaggedToken> tokens);

std::vector<std::string> words_of(std::span<const TaggedToken> tokens);
std::vector<std::string> tags_of(std::span<const TaggedToken> tokens);

// Tokens with tags removed.
Sentence untag(std::span<const TaggedToken> tokens);

Sentence tree_leaves(const Tree& t);
std::size_t tree_height(const Tree& t);
// A bare leaf or placeholder has height 1.
std::size_t tree_height(const Tree::Child& c);

// True when leaf locations are strictly increasing and adjacent.
bool leaves_contiguous(const Tree& t);

// Bracketed one-line rendering, e.g. `(S (NP I) (VP sleep))`. Leaves print
// their text, or `text/TAG` when with_tags is set; placeholders print `X?`.
std::string to_bracketed(const Tree& t, bool with_tags = false);

}  // namespace nlkit
