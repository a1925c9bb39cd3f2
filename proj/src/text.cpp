#include "nlkit/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace nlkit {

UncoveredTokens::UncoveredTokens(std::set<std::string> words)
    : Error([&] {
        std::string msg = "tokens not covered by the grammar:";
        for (const auto& w : words) msg += " " + w;
        return msg;
      }()),
      words_(std::move(words)) {}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> items;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) items.push_back(text.substr(i, j - i));
    i = j;
  }
  return items;
}

}  // namespace

bool operator==(const Tree& a, const Tree& b) {
  return a.node == b.node && a.children == b.children;
}

bool operator<(const Tree& a, const Tree& b) {
  if (a.node != b.node) return a.node < b.node;
  return std::lexicographical_compare(a.children.begin(), a.children.end(),
                                      b.children.begin(), b.children.end());
}

Sentence tokenize_whitespace(std::string_view text, std::optional<std::string> source) {
  Sentence out;
  for (auto item : split_ws(text)) {
    const std::size_t k = out.size();
    out.push_back(TaggedToken{std::string(item), std::nullopt, Location{k, k + 1, source}});
  }
  return out;
}

Sentence read_tagged(std::string_view text) {
  Sentence out;
  for (auto item : split_ws(text)) {
    const std::size_t k = out.size();
    const auto slash = item.rfind('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == item.size())
      throw MalformedTaggedItem(k);
    out.push_back(TaggedToken{std::string(item.substr(0, slash)),
                              std::string(item.substr(slash + 1)), Location{k, k + 1, {}}});
  }
  return out;
}

std::string format_tagged(std::span<const TaggedToken> tokens) {
  std::string out;
  for (const auto& tok : tokens) {
    if (!out.empty()) out += ' ';
    out += tok.text;
    if (tok.tag) out += "/" + *tok.tag;
  }
  return out;
}

std::vector<std::string> words_of(std::span<const TaggedToken> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

std::vector<std::string> tags_of(std::span<const TaggedToken> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.tag.value_or(""));
  return out;
}

Sentence untag(std::span<const TaggedToken> tokens) {
  Sentence out(tokens.begin(), tokens.end());
  for (auto& t : out) t.tag.reset();
  return out;
}

namespace {

void collect_leaves(const Tree& t, Sentence& out) {
  for (const auto& child : t.children) {
    if (const auto* sub = std::get_if<Tree>(&child))
      collect_leaves(*sub, out);
    else if (const auto* leaf = std::get_if<TaggedToken>(&child))
      out.push_back(*leaf);
  }
}

void render(const Tree& t, bool with_tags, std::ostringstream& os) {
  os << '(' << t.node;
  for (const auto& child : t.children) {
    os << ' ';
    if (const auto* sub = std::get_if<Tree>(&child)) {
      render(*sub, with_tags, os);
    } else if (const auto* leaf = std::get_if<TaggedToken>(&child)) {
      os << leaf->text;
      if (with_tags && leaf->tag) os << '/' << *leaf->tag;
    } else {
      os << std::get<Placeholder>(child).symbol << '?';
    }
  }
  os << ')';
}

}  // namespace

Sentence tree_leaves(const Tree& t) {
  Sentence out;
  collect_leaves(t, out);
  return out;
}

std::size_t tree_height(const Tree& t) {
  std::size_t best = 0;
  for (const auto& child : t.children) {
    const auto* sub = std::get_if<Tree>(&child);
    best = std::max(best, sub ? tree_height(*sub) : std::size_t{1});
  }
  return best + 1;
}

std::size_t tree_height(const Tree::Child& c) {
  const auto* sub = std::get_if<Tree>(&c);
  return sub ? tree_height(*sub) : 1;
}

bool leaves_contiguous(const Tree& t) {
  const auto leaves = tree_leaves(t);
  for (std::size_t k = 1; k < leaves.size(); ++k) {
    if (leaves[k].loc.start != leaves[k - 1].loc.end) return false;
    if (leaves[k].loc.start <= leaves[k - 1].loc.start) return false;
  }
  return true;
}

std::string to_bracketed(const Tree& t, bool with_tags) {
  std::ostringstream os;
  render(t, with_tags, os);
  return os.str();
}

}  // namespace nlkit
