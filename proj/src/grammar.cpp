#include "nlkit/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

namespace nlkit {

std::string Symbol::str() const {
  if (!terminal) return name;
  const char q = name.find('\'') == std::string::npos ? '\'' : '"';
  return q + name + q;
}

bool Production::is_lexical() const {
  return std::all_of(rhs.begin(), rhs.end(), [](const Symbol& s) { return s.terminal; });
}

bool Production::has_terminal() const {
  return std::any_of(rhs.begin(), rhs.end(), [](const Symbol& s) { return s.terminal; });
}

std::string Production::str() const {
  std::string out = lhs + " ->";
  for (const auto& s : rhs) out += " " + s.str();
  return out;
}

Grammar::Grammar(std::string start, std::vector<Production> productions)
    : start_(std::move(start)), productions_(std::move(productions)) {
  std::set<std::string> lhs_set;
  for (const auto& p : productions_) {
    if (p.rhs.empty()) throw FormatError("empty right-hand side for " + p.lhs);
    lhs_set.insert(p.lhs);
  }
  if (!lhs_set.count(start_)) throw FormatError("start symbol " + start_ + " has no productions");
  nonterminals_.assign(lhs_set.begin(), lhs_set.end());
  by_lhs_.resize(nonterminals_.size());
  for (std::size_t k = 0; k < productions_.size(); ++k) {
    const auto& p = productions_[k];
    auto it = std::lower_bound(nonterminals_.begin(), nonterminals_.end(), p.lhs);
    by_lhs_[static_cast<std::size_t>(it - nonterminals_.begin())].push_back(k);
    for (const auto& s : p.rhs) {
      if (s.terminal)
        vocabulary_.insert(s.name);
      else if (!lhs_set.count(s.name))
        throw FormatError("nonterminal " + s.name + " has no productions");
    }
  }
}

bool Grammar::is_nonterminal(std::string_view name) const {
  return std::binary_search(nonterminals_.begin(), nonterminals_.end(), name);
}

const std::vector<std::size_t>& Grammar::expansions(const std::string& lhs) const {
  static const std::vector<std::size_t> none;
  auto it = std::lower_bound(nonterminals_.begin(), nonterminals_.end(), lhs);
  if (it == nonterminals_.end() || *it != lhs) return none;
  return by_lhs_[static_cast<std::size_t>(it - nonterminals_.begin())];
}

void Grammar::require_acyclic() const {
  // Depth-first search over the unary nonterminal graph A -> B.
  std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
  auto visit = [&](auto&& self, const std::string& a) -> void {
    state[a] = 1;
    for (auto k : expansions(a)) {
      const auto& p = productions_[k];
      if (p.rhs.size() != 1 || p.rhs[0].terminal) continue;
      const auto& b = p.rhs[0].name;
      if (state[b] == 1) throw CyclicGrammar(b);
      if (state[b] == 0) self(self, b);
    }
    state[a] = 2;
  };
  for (const auto& a : nonterminals_)
    if (state[a] == 0) visit(visit, a);
}

bool operator==(const Grammar& a, const Grammar& b) {
  if (a.start_ != b.start_) return false;
  auto pa = a.productions_, pb = b.productions_;
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  return pa == pb;
}

namespace {

struct Alternative {
  std::vector<Symbol> rhs;
  std::optional<double> prob;
};

struct Line {
  std::size_t number;
  std::string lhs;
  std::vector<Alternative> alternatives;
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Splits one non-blank line into lhs and alternatives.
Line parse_line(std::string_view text, std::size_t number, bool weighted) {
  Line line{number, {}, {}};
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && is_space(text[i])) ++i;
  };

  skip();
  if (i < text.size() && (text[i] == '\'' || text[i] == '"'))
    throw InvalidProduction(number, "terminal on left-hand side");
  const std::size_t lhs_begin = i;
  while (i < text.size() && !is_space(text[i]) && text.substr(i, 2) != "->") ++i;
  line.lhs = std::string(text.substr(lhs_begin, i - lhs_begin));
  skip();
  if (line.lhs.empty() || text.substr(i, 2) != "->")
    throw GrammarSyntax(number, "expected `LHS -> ...`");
  if (line.lhs.find_first_of("|[]") != std::string::npos)
    throw GrammarSyntax(number, "bad left-hand side '" + line.lhs + "'");
  i += 2;

  Alternative current;
  auto close_alternative = [&] {
    if (current.rhs.empty()) throw GrammarSyntax(number, "empty alternative");
    if (weighted && !current.prob) throw GrammarSyntax(number, "missing [p] probability");
    line.alternatives.push_back(std::move(current));
    current = Alternative{};
  };

  for (;;) {
    skip();
    if (i >= text.size()) break;
    const char c = text[i];
    if (current.prob && c != '|')
      throw GrammarSyntax(number, "symbols after probability");
    if (c == '|') {
      close_alternative();
      ++i;
      continue;
    }
    if (c == '\'' || c == '"') {
      const auto close = text.find(c, i + 1);
      if (close == std::string_view::npos) throw GrammarSyntax(number, "unterminated quote");
      if (close == i + 1) throw GrammarSyntax(number, "empty terminal");
      current.rhs.push_back(Symbol::term(std::string(text.substr(i + 1, close - i - 1))));
      i = close + 1;
      continue;
    }
    if (c == '[') {
      if (!weighted) throw GrammarSyntax(number, "unexpected '['");
      const auto close = text.find(']', i);
      if (close == std::string_view::npos) throw GrammarSyntax(number, "unterminated [p]");
      std::string body(text.substr(i + 1, close - i - 1));
      char* end = nullptr;
      const double p = std::strtod(body.c_str(), &end);
      if (body.empty() || end == body.c_str() || *end != '\0')
        throw GrammarSyntax(number, "bad probability '" + body + "'");
      if (!(p > 0.0 && p <= 1.0)) throw InvalidProbability(number, body);
      if (current.rhs.empty()) throw GrammarSyntax(number, "probability without symbols");
      current.prob = p;
      i = close + 1;
      continue;
    }
    if (c == ']') throw GrammarSyntax(number, "unexpected ']'");
    const std::size_t begin = i;
    while (i < text.size() && !is_space(text[i]) &&
           std::string_view("|[]'\"").find(text[i]) == std::string_view::npos)
      ++i;
    const auto name = text.substr(begin, i - begin);
    if (name.find("->") != std::string_view::npos) throw GrammarSyntax(number, "repeated `->`");
    current.rhs.push_back(Symbol::nt(std::string(name)));
  }
  close_alternative();
  return line;
}

// Strips a `#` comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::vector<Line> parse_lines(std::string_view text, bool weighted) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++number;
    auto raw = strip_comment(text.substr(pos, nl - pos));
    if (std::any_of(raw.begin(), raw.end(), [](char c) { return !is_space(c); }))
      lines.push_back(parse_line(raw, number, weighted));
    pos = nl + 1;
  }
  if (lines.empty()) throw GrammarSyntax(number, "no productions");

  // Duplicate productions and undefined nonterminals, reported by line.
  std::set<std::string> defined;
  for (const auto& l : lines) defined.insert(l.lhs);
  std::set<Production> seen;
  for (const auto& l : lines) {
    for (const auto& alt : l.alternatives) {
      Production p{l.lhs, alt.rhs};
      if (!seen.insert(p).second) throw InvalidProduction(l.number, "duplicate " + p.str());
      for (const auto& s : alt.rhs)
        if (!s.terminal && !defined.count(s.name))
          throw InvalidProduction(l.number, "nonterminal " + s.name + " has no productions");
    }
  }
  return lines;
}

}  // namespace

Grammar parse_cfg(std::string_view text) {
  const auto lines = parse_lines(text, false);
  std::vector<Production> productions;
  for (const auto& l : lines)
    for (const auto& alt : l.alternatives) productions.push_back(Production{l.lhs, alt.rhs});
  return Grammar(lines.front().lhs, std::move(productions));
}

PcfgGrammar::PcfgGrammar(std::string start, std::vector<WeightedProduction> productions)
    : productions_(std::move(productions)), cfg_([&] {
        std::vector<Production> plain;
        plain.reserve(productions_.size());
        for (const auto& wp : productions_) plain.push_back(wp.production);
        return Grammar(std::move(start), std::move(plain));
      }()) {
  std::map<std::string, double> sums;
  for (const auto& wp : productions_) {
    if (!(wp.prob > 0.0 && wp.prob <= 1.0))
      throw InvalidProbability(0, std::to_string(wp.prob) + " for " + wp.production.str());
    sums[wp.production.lhs] += wp.prob;
  }
  for (const auto& [lhs, sum] : sums)
    if (std::abs(sum - 1.0) > kNormalizationTolerance) throw NotNormalized(lhs, sum);
}

std::size_t PcfgGrammar::find(const Production& p) const {
  for (auto k : cfg_.expansions(p.lhs))
    if (productions_[k].production == p) return k;
  return npos;
}

PcfgGrammar parse_pcfg(std::string_view text) {
  const auto lines = parse_lines(text, true);
  std::vector<WeightedProduction> productions;
  for (const auto& l : lines)
    for (const auto& alt : l.alternatives)
      productions.push_back(WeightedProduction{Production{l.lhs, alt.rhs}, *alt.prob});
  return PcfgGrammar(lines.front().lhs, std::move(productions));
}

namespace {

// Production indices with the start symbol's expansions first, so that the
// first line of the output names the start symbol.
std::vector<std::size_t> start_first_order(const Grammar& g) {
  std::vector<std::size_t> order = g.expansions(g.start());
  for (std::size_t k = 0; k < g.productions().size(); ++k)
    if (g.productions()[k].lhs != g.start()) order.push_back(k);
  return order;
}

}  // namespace

std::string format_cfg(const Grammar& g) {
  std::string out;
  for (auto k : start_first_order(g)) out += g.productions()[k].str() + "\n";
  return out;
}

std::string format_pcfg(const PcfgGrammar& g) {
  std::ostringstream os;
  os.precision(17);
  for (auto k : start_first_order(g.cfg()))
    os << g.productions()[k].production.str() << " [" << g.prob(k) << "]\n";
  return os.str();
}

std::set<std::string> check_coverage(const Grammar& g, std::span<const TaggedToken> tokens) {
  std::set<std::string> missing;
  for (const auto& t : tokens)
    if (!g.vocabulary().count(t.text)) missing.insert(t.text);
  return missing;
}

}  // namespace nlkit
