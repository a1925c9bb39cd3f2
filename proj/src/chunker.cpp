#include "nlkit/chunker.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace nlkit {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

constexpr std::string_view kAnyInTag = "[^{}<>]";

}  // namespace

TagPattern::TagPattern(std::string_view source) {
  for (char c : source)
    if (!is_space(c)) source_ += c;
  if (source_.empty()) throw PatternSyntax(std::string(source), "empty pattern");

  bool in_tag = false;
  bool in_class = false;
  std::size_t tag_begin = 0;
  for (std::size_t i = 0; i < source_.size(); ++i) {
    const char c = source_[i];
    if (c == '\\') {
      if (i + 1 == source_.size()) throw PatternSyntax(source_, "trailing backslash");
      regex_ += c;
      regex_ += source_[++i];
      continue;
    }
    if (in_class) {
      if (c == '<' || c == '>' || c == '{' || c == '}')
        throw PatternSyntax(source_, "bracket inside character class");
      if (c == ']') in_class = false;
      regex_ += c;
      continue;
    }
    switch (c) {
      case '<':
        if (in_tag) throw PatternSyntax(source_, "nested '<'");
        in_tag = true;
        tag_begin = i;
        regex_ += "(?:<(?:";
        break;
      case '>':
        if (!in_tag) throw PatternSyntax(source_, "unbalanced '>'");
        if (i == tag_begin + 1) throw PatternSyntax(source_, "empty tag '<>'");
        in_tag = false;
        regex_ += ")>)";
        break;
      case '{':
      case '}':
        throw PatternSyntax(source_, "braces are reserved for chunk boundaries");
      case '.':
        regex_ += kAnyInTag;
        break;
      case '[':
        in_class = true;
        regex_ += c;
        break;
      default:
        regex_ += c;
    }
  }
  if (in_tag) throw PatternSyntax(source_, "unbalanced '<'");
  if (in_class) throw PatternSyntax(source_, "unterminated character class");
  try {
    re_ = std::regex(regex_, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw PatternSyntax(source_, e.what());
  }
}

bool TagPattern::matches(std::span<const std::string> tags) const {
  return matches_encoded(encode_tags(tags));
}

bool TagPattern::matches_encoded(std::string_view encoded) const {
  return std::regex_match(encoded.begin(), encoded.end(), re_);
}

TagPattern compile_tag_pattern(std::string_view source) { return TagPattern(source); }

std::string encode_tags(std::span<const std::string> tags) {
  std::string out;
  for (const auto& t : tags) out += "<" + t + ">";
  return out;
}

namespace {

constexpr std::pair<ChunkRuleKind, std::string_view> kKindNames[] = {
    {ChunkRuleKind::Chunk, "Chunk"}, {ChunkRuleKind::Chink, "Chink"}, {ChunkRuleKind::UnChunk, "UnChunk"},
    {ChunkRuleKind::Merge, "Merge"}, {ChunkRuleKind::Split, "Split"},
};

std::size_t pattern_count(ChunkRuleKind kind) {
  return kind == ChunkRuleKind::Merge || kind == ChunkRuleKind::Split ? 2 : 1;
}

// The sentence's tag string with the offset of each token's unit, so any
// token range maps to a substring.
class TagString {
 public:
  explicit TagString(const Sentence& tokens) {
    offsets_.push_back(0);
    for (const auto& t : tokens) {
      text_ += "<" + t.tag.value_or("") + ">";
      offsets_.push_back(text_.size());
    }
  }
  bool match(const TagPattern& p, std::size_t i, std::size_t j) const {
    return p.matches_encoded(std::string_view(text_).substr(offsets_[i], offsets_[j] - offsets_[i]));
  }
  // Some non-empty suffix of [a, b) matches.
  bool suffix_matches(const TagPattern& p, std::size_t a, std::size_t b) const {
    for (std::size_t x = a; x < b; ++x)
      if (match(p, x, b)) return true;
    return false;
  }
  // Some non-empty prefix of [a, b) matches.
  bool prefix_matches(const TagPattern& p, std::size_t a, std::size_t b) const {
    for (std::size_t y = a + 1; y <= b; ++y)
      if (match(p, a, y)) return true;
    return false;
  }
  // Longest non-empty match starting at x and ending at or before limit.
  std::size_t longest_from(const TagPattern& p, std::size_t x, std::size_t limit) const {
    for (std::size_t y = limit; y > x; --y)
      if (match(p, x, y)) return y;
    return x;
  }

 private:
  std::string text_;
  std::vector<std::size_t> offsets_;
};

std::vector<Span> chunk_rule(const TagString& ts, const TagPattern& p, const std::vector<Span>& chunks,
                             std::size_t n) {
  std::vector<Span> out = chunks;
  std::size_t i = 0;
  auto next_chunk = chunks.begin();
  while (i < n) {
    while (next_chunk != chunks.end() && next_chunk->end <= i) ++next_chunk;
    if (next_chunk != chunks.end() && next_chunk->start <= i) {
      i = next_chunk->end;
      continue;
    }
    const std::size_t limit = next_chunk == chunks.end() ? n : next_chunk->start;
    const std::size_t j = ts.longest_from(p, i, limit);
    if (j > i) {
      out.push_back(Span{i, j});
      i = j;
    } else {
      ++i;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Span> chink_rule(const TagString& ts, const TagPattern& p, const std::vector<Span>& chunks) {
  std::vector<Span> out;
  for (const auto& c : chunks) {
    std::size_t kept_from = c.start;
    std::size_t x = c.start;
    while (x < c.end) {
      const std::size_t y = ts.longest_from(p, x, c.end);
      if (y > x) {
        if (kept_from < x) out.push_back(Span{kept_from, x});
        kept_from = x = y;
      } else {
        ++x;
      }
    }
    if (kept_from < c.end) out.push_back(Span{kept_from, c.end});
  }
  return out;
}

std::vector<Span> unchunk_rule(const TagString& ts, const TagPattern& p, const std::vector<Span>& chunks) {
  std::vector<Span> out;
  for (const auto& c : chunks)
    if (!ts.match(p, c.start, c.end)) out.push_back(c);
  return out;
}

std::vector<Span> merge_rule(const TagString& ts, const TagPattern& left, const TagPattern& right,
                             const std::vector<Span>& chunks) {
  std::vector<Span> out;
  for (const auto& c : chunks) {
    if (!out.empty() && out.back().end == c.start && ts.suffix_matches(left, out.back().start, c.start) &&
        ts.prefix_matches(right, c.start, c.end)) {
      out.back().end = c.end;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<Span> split_rule(const TagString& ts, const TagPattern& left, const TagPattern& right,
                             const std::vector<Span>& chunks) {
  std::vector<Span> out;
  for (const auto& c : chunks) {
    std::vector<std::size_t> cuts;
    std::size_t x = c.start;
    while (x < c.end) {
      std::size_t cut = x;
      for (std::size_t k = c.end - 1; k > x; --k) {
        if (ts.match(left, x, k) && ts.prefix_matches(right, k, c.end)) {
          cut = k;
          break;
        }
      }
      if (cut > x) {
        cuts.push_back(cut);
        x = cut;
      } else {
        ++x;
      }
    }
    std::size_t from = c.start;
    for (auto k : cuts) {
      out.push_back(Span{from, k});
      from = k;
    }
    out.push_back(Span{from, c.end});
  }
  return out;
}

}  // namespace

std::string_view chunk_rule_name(ChunkRuleKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

ChunkRuleKind parse_chunk_rule_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n.size() != name.size()) continue;
    if (std::equal(n.begin(), n.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        }))
      return k;
  }
  throw FormatError("unknown chunk rule kind '" + std::string(name) + "'");
}

bool ChunkStructure::valid() const {
  std::size_t prev_end = 0;
  for (const auto& c : chunks) {
    if (c.start >= c.end || c.end > tokens.size() || c.start < prev_end) return false;
    prev_end = c.end;
  }
  return true;
}

ChunkRule::ChunkRule(ChunkRuleSpec spec) : spec_(std::move(spec)) {
  if (spec_.patterns.size() != pattern_count(spec_.kind))
    throw FormatError(std::string(chunk_rule_name(spec_.kind)) + " rule needs " +
                      std::to_string(pattern_count(spec_.kind)) + " pattern(s)");
  for (const auto& p : spec_.patterns) patterns_.emplace_back(p);
}

ChunkStructure ChunkRule::apply(const ChunkStructure& cs) const {
  const TagString ts(cs.tokens);
  ChunkStructure out{cs.tokens, {}};
  switch (spec_.kind) {
    case ChunkRuleKind::Chunk: out.chunks = chunk_rule(ts, patterns_[0], cs.chunks, cs.tokens.size()); break;
    case ChunkRuleKind::Chink: out.chunks = chink_rule(ts, patterns_[0], cs.chunks); break;
    case ChunkRuleKind::UnChunk: out.chunks = unchunk_rule(ts, patterns_[0], cs.chunks); break;
    case ChunkRuleKind::Merge: out.chunks = merge_rule(ts, patterns_[0], patterns_[1], cs.chunks); break;
    case ChunkRuleKind::Split: out.chunks = split_rule(ts, patterns_[0], patterns_[1], cs.chunks); break;
  }
  return out;
}

ChunkStructure apply_chunk_rule(const ChunkStructure& cs, const ChunkRuleSpec& rule) {
  return ChunkRule(rule).apply(cs);
}

std::vector<ChunkRule> compile_cascade(std::span<const ChunkRuleSpec> rules) {
  std::vector<ChunkRule> out;
  out.reserve(rules.size());
  for (const auto& r : rules) out.emplace_back(r);
  return out;
}

ChunkStructure apply_cascade(const ChunkStructure& cs, std::span<const ChunkRule> rules) {
  ChunkStructure out = cs;
  for (const auto& r : rules) out = r.apply(out);
  return out;
}

ChunkStructure apply_cascade(const ChunkStructure& cs, std::span<const ChunkRuleSpec> rules) {
  const auto compiled = compile_cascade(rules);
  return apply_cascade(cs, std::span<const ChunkRule>(compiled));
}

ChunkStructure unchunk(const ChunkStructure& gold) { return ChunkStructure{gold.tokens, {}}; }

std::string encode_chunk_string(const ChunkStructure& cs) {
  std::string out;
  auto chunk = cs.chunks.begin();
  for (std::size_t k = 0; k < cs.tokens.size(); ++k) {
    if (chunk != cs.chunks.end() && chunk->start == k) out += '{';
    out += "<" + cs.tokens[k].tag.value_or("") + ">";
    if (chunk != cs.chunks.end() && chunk->end == k + 1) {
      out += '}';
      ++chunk;
    }
  }
  return out;
}

ChunkStructure decode_chunk_string(std::string_view encoded, const Sentence& tokens) {
  ChunkStructure out{tokens, {}};
  std::size_t k = 0;
  std::optional<std::size_t> open;
  for (std::size_t i = 0; i < encoded.size();) {
    const char c = encoded[i];
    if (c == '{') {
      if (open) throw FormatError("nested '{' in chunk string");
      open = k;
      ++i;
    } else if (c == '}') {
      if (!open || *open == k) throw FormatError("bad '}' in chunk string");
      out.chunks.push_back(Span{*open, k});
      open.reset();
      ++i;
    } else if (c == '<') {
      const auto close = encoded.find('>', i);
      if (close == std::string_view::npos) throw FormatError("unterminated tag in chunk string");
      const auto tag = encoded.substr(i + 1, close - i - 1);
      if (k >= tokens.size() || tokens[k].tag.value_or("") != tag)
        throw FormatError("chunk string does not match the sentence tags");
      ++k;
      i = close + 1;
    } else {
      throw FormatError(std::string("unexpected '") + c + "' in chunk string");
    }
  }
  if (open || k != tokens.size()) throw FormatError("chunk string does not cover the sentence");
  return out;
}

ChunkStructure parse_gold_line(std::string_view line) {
  ChunkStructure out;
  constexpr auto kClosed = static_cast<std::size_t>(-1);
  std::size_t open = kClosed;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j == i) break;
    const auto item = line.substr(i, j - i);
    i = j;
    const auto k = out.tokens.size();
    if (item == "[") {
      if (open != kClosed) throw FormatError("nested '[' in gold line");
      open = k;
    } else if (item == "]") {
      if (open == kClosed) throw FormatError("unbalanced ']' in gold line");
      if (open == k) throw FormatError("empty chunk in gold line");
      out.chunks.push_back(Span{open, k});
      open = kClosed;
    } else {
      auto tok = read_tagged(item);
      tok.front().loc = Location{k, k + 1, {}};
      out.tokens.push_back(std::move(tok.front()));
    }
  }
  if (open != kClosed) throw FormatError("unbalanced '[' in gold line");
  return out;
}

std::string format_gold_line(const ChunkStructure& cs) {
  std::string out;
  auto chunk = cs.chunks.begin();
  auto add = [&](const std::string& s) {
    if (!out.empty()) out += ' ';
    out += s;
  };
  for (std::size_t k = 0; k < cs.tokens.size(); ++k) {
    if (chunk != cs.chunks.end() && chunk->start == k) add("[");
    add(format_tagged(std::span<const TaggedToken>(&cs.tokens[k], 1)));
    if (chunk != cs.chunks.end() && chunk->end == k + 1) {
      add("]");
      ++chunk;
    }
  }
  return out;
}

std::vector<ChunkStructure> read_gold_corpus(std::string_view text) {
  std::vector<ChunkStructure> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (std::all_of(line.begin(), line.end(), is_space)) continue;
    try {
      out.push_back(parse_gold_line(line));
    } catch (const Error& e) {
      throw FormatError("gold line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

double ChunkScore::precision() const {
  return guessed == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(guessed);
}

double ChunkScore::recall() const {
  return gold == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(this->gold);
}

double ChunkScore::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

namespace {

bool same_tokens(const Sentence& a, const Sentence& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const TaggedToken& x, const TaggedToken& y) { return x.text == y.text && x.tag == y.tag; });
}

void accumulate(ChunkScore& score, std::size_t sentence, const ChunkStructure& gold, const ChunkStructure& test) {
  if (!same_tokens(gold.tokens, test.tokens)) throw TokenMismatch();
  const std::set<Span> g(gold.chunks.begin(), gold.chunks.end());
  const std::set<Span> t(test.chunks.begin(), test.chunks.end());
  score.gold += g.size();
  score.guessed += t.size();
  for (const auto& s : t) {
    if (g.count(s))
      ++score.correct;
    else
      score.incorrect.push_back(SentenceSpan{sentence, s});
  }
  for (const auto& s : g)
    if (!t.count(s)) score.missed.push_back(SentenceSpan{sentence, s});
}

}  // namespace

ChunkScore score_chunks(const ChunkStructure& gold, const ChunkStructure& test) {
  ChunkScore score;
  accumulate(score, 0, gold, test);
  return score;
}

ChunkScore score_corpus(std::span<const ChunkStructure> gold, std::span<const ChunkStructure> test) {
  if (gold.size() != test.size()) throw TokenMismatch();
  ChunkScore score;
  for (std::size_t k = 0; k < gold.size(); ++k) accumulate(score, k, gold[k], test[k]);
  return score;
}

std::map<std::string, double> np_tag_rates(std::span<const ChunkStructure> corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // inside, total
  for (const auto& cs : corpus) {
    std::vector<bool> inside(cs.tokens.size(), false);
    for (const auto& c : cs.chunks)
      for (auto k = c.start; k < c.end; ++k) inside[k] = true;
    for (std::size_t k = 0; k < cs.tokens.size(); ++k) {
      auto& [in, total] = counts[cs.tokens[k].tag.value_or("")];
      in += inside[k] ? 1 : 0;
      ++total;
    }
  }
  std::map<std::string, double> rates;
  for (const auto& [tag, c] : counts)
    rates[tag] = static_cast<double>(c.first) / static_cast<double>(c.second);
  return rates;
}

ChunkRuleSpec rule_from_tag_rates(const std::map<std::string, double>& rates, double threshold) {
  std::string alternation;
  for (const auto& [tag, rate] : rates) {
    if (!(rate > threshold)) continue;
    if (!alternation.empty()) alternation += '|';
    for (char c : tag) {
      if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) alternation += '\\';
      alternation += c;
    }
  }
  ChunkRuleSpec spec{ChunkRuleKind::Chunk, {}, "tags inside a chunk more than " + std::to_string(threshold) + " of the time"};
  // With no qualifying tag the rule can never fire; `<>` is not a valid pattern.
  spec.patterns.push_back(alternation.empty() ? "(?!)" : "<" + alternation + ">*");
  return spec;
}

std::vector<ChunkRuleSpec> cascade_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("cascade must be a JSON array");
  std::vector<ChunkRuleSpec> out;
  try {
    for (const auto& r : j) {
      ChunkRuleSpec spec{parse_chunk_rule_kind(r.at("kind").get<std::string>()),
                         r.at("patterns").get<std::vector<std::string>>(), r.value("note", std::string{})};
      ChunkRule check(spec);
      out.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed cascade: ") + e.what());
  }
  return out;
}

nlohmann::json cascade_to_json(std::span<const ChunkRuleSpec> rules) {
  auto out = nlohmann::json::array();
  for (const auto& r : rules)
    out.push_back({{"kind", std::string(chunk_rule_name(r.kind))}, {"patterns", r.patterns}, {"note", r.note}});
  return out;
}

}  // namespace nlkit
