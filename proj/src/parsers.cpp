#include "nlkit/parsers.hpp"

#include <algorithm>
#include <map>

namespace nlkit {

std::string SrAction::str() const {
  if (kind == Kind::Shift) return "Shift " + token;
  return "Reduce " + production->str();
}

namespace {

Symbol label_of(const Tree::Child& item) {
  if (const auto* t = std::get_if<Tree>(&item)) return Symbol::nt(t->node);
  if (const auto* tok = std::get_if<TaggedToken>(&item)) return Symbol::term(tok->text);
  return Symbol::nt(std::get<Placeholder>(item).symbol);
}

bool matches_top(const std::vector<Tree::Child>& stack, const Production& p) {
  if (p.rhs.size() > stack.size()) return false;
  const auto base = stack.size() - p.rhs.size();
  for (std::size_t k = 0; k < p.rhs.size(); ++k)
    if (label_of(stack[base + k]) != p.rhs[k]) return false;
  return true;
}

}  // namespace

SrResult sr_parse(const Grammar& g, std::span<const TaggedToken> tokens) {
  g.require_acyclic();
  SrResult result;
  std::vector<Tree::Child> stack;
  std::size_t next = 0;

  auto record = [&](SrAction action) {
    result.trace.push_back(SrTraceStep{std::move(action), stack, tokens.size() - next});
  };

  for (;;) {
    const Production* reducer = nullptr;
    for (const auto& p : g.productions()) {
      if (matches_top(stack, p)) {
        reducer = &p;
        break;
      }
    }
    if (reducer) {
      Tree t(reducer->lhs);
      const auto base = stack.size() - reducer->rhs.size();
      t.children.assign(std::make_move_iterator(stack.begin() + static_cast<std::ptrdiff_t>(base)),
                        std::make_move_iterator(stack.end()));
      stack.resize(base);
      stack.emplace_back(std::move(t));
      record(SrAction{SrAction::Kind::Reduce, {}, *reducer});
      continue;
    }
    if (next < tokens.size()) {
      TaggedToken tok = tokens[next];
      tok.loc = Location{next, next + 1, tok.loc.source};
      ++next;
      stack.emplace_back(tok);
      record(SrAction{SrAction::Kind::Shift, tok.text, std::nullopt});
      continue;
    }
    break;
  }

  if (stack.size() == 1) {
    if (const auto* t = std::get_if<Tree>(&stack.front()); t && t->node == g.start()) result.tree = *t;
  }
  return result;
}

namespace {

constexpr double kTieTolerance = 1e-12;

bool better(double candidate, double incumbent) {
  return candidate > incumbent * (1.0 + kTieTolerance) && candidate > 0.0;
}

// Dynamic program over constituents (A, i, j) and dotted items (p, d, i, j),
// where item (p, d) covers rhs[0..d) of production p.
class ViterbiTable {
 public:
  ViterbiTable(const PcfgGrammar& g, std::span<const TaggedToken> tokens)
      : g_(g), tokens_(tokens), n_(tokens.size()), width_(n_ + 1) {
    const auto& prods = g.productions();
    for (const auto& wp : prods) nt_index_.emplace(wp.production.lhs, nt_index_.size());
    offsets_.resize(prods.size());
    std::size_t total = 0;
    for (std::size_t p = 0; p < prods.size(); ++p) {
      offsets_[p] = total;
      total += prods[p].production.rhs.size();
    }
    constituents_.assign(nt_index_.size() * width_ * width_, Cell{});
    items_.assign(total * width_ * width_, Cell{});
  }

  std::optional<ScoredTree> run() {
    if (n_ == 0) return std::nullopt;
    for (std::size_t len = 1; len <= n_; ++len)
      for (std::size_t i = 0; i + len <= n_; ++i) fill_span(i, i + len);
    const auto& root = constituent(nt(g_.start()), 0, n_);
    if (root.prob <= 0.0) return std::nullopt;
    return ScoredTree{build(nt(g_.start()), 0, n_), root.prob};
  }

 private:
  struct Cell {
    double prob = 0.0;
    std::size_t back = 0;  // production for constituents, split point for items
  };

  std::size_t nt(const std::string& name) const { return nt_index_.at(name); }
  Cell& constituent(std::size_t a, std::size_t i, std::size_t j) {
    return constituents_[(a * width_ + i) * width_ + j];
  }
  Cell& item(std::size_t p, std::size_t d, std::size_t i, std::size_t j) {
    return items_[((offsets_[p] + d - 1) * width_ + i) * width_ + j];
  }

  // Inside score of one symbol over (k, j).
  double symbol_score(const Symbol& s, std::size_t k, std::size_t j) {
    if (s.terminal) return (j == k + 1 && tokens_[k].text == s.name) ? 1.0 : 0.0;
    return constituent(nt(s.name), k, j).prob;
  }

  void fill_span(std::size_t i, std::size_t j) {
    const auto& prods = g_.productions();
    // Items with d >= 2 only depend on strictly shorter spans.
    for (std::size_t p = 0; p < prods.size(); ++p) {
      const auto& rhs = prods[p].production.rhs;
      for (std::size_t d = 2; d <= rhs.size(); ++d) {
        auto& cell = item(p, d, i, j);
        for (std::size_t k = i + 1; k < j; ++k) {
          const double left = item(p, d - 1, i, k).prob;
          if (left <= 0.0) continue;
          const double v = left * symbol_score(rhs[d - 1], k, j);
          if (better(v, cell.prob)) cell = Cell{v, k};
        }
      }
    }
    // Single-symbol items over the whole span depend on constituents of the
    // same span (unary productions), so relax until nothing improves.
    for (std::size_t pass = 0; pass <= nt_index_.size() + 1; ++pass) {
      bool changed = false;
      for (std::size_t p = 0; p < prods.size(); ++p) {
        const auto& rhs = prods[p].production.rhs;
        auto& first = item(p, 1, i, j);
        const double v = symbol_score(rhs[0], i, j);
        if (better(v, first.prob)) first = Cell{v, i};
        const double inside = item(p, rhs.size(), i, j).prob;
        auto& c = constituent(nt(prods[p].production.lhs), i, j);
        const double score = prods[p].prob * inside;
        if (inside > 0.0 && better(score, c.prob)) {
          c = Cell{score, p};
          changed = true;
        }
      }
      if (!changed) break;
    }
  }

  Tree build(std::size_t a, std::size_t i, std::size_t j) {
    const auto p = constituent(a, i, j).back;
    const auto& prod = g_.productions()[p].production;
    Tree t(prod.lhs);
    std::vector<Tree::Child> reversed;
    std::size_t end = j;
    for (std::size_t d = prod.rhs.size(); d >= 1; --d) {
      const std::size_t k = item(p, d, i, end).back;
      const auto& s = prod.rhs[d - 1];
      if (s.terminal) {
        TaggedToken tok = tokens_[k];
        tok.loc = Location{k, k + 1, tok.loc.source};
        reversed.emplace_back(std::move(tok));
      } else {
        reversed.emplace_back(build(nt(s.name), k, end));
      }
      end = k;
    }
    t.children.assign(std::make_move_iterator(reversed.rbegin()), std::make_move_iterator(reversed.rend()));
    return t;
  }

  const PcfgGrammar& g_;
  std::span<const TaggedToken> tokens_;
  std::size_t n_;
  std::size_t width_;
  std::map<std::string, std::size_t> nt_index_;
  std::vector<std::size_t> offsets_;
  std::vector<Cell> constituents_;
  std::vector<Cell> items_;
};

}  // namespace

std::optional<ScoredTree> ViterbiParser::parse(std::span<const TaggedToken> tokens) const {
  return ViterbiTable(grammar_, tokens).run();
}

std::optional<ScoredTree> viterbi_parse(const PcfgGrammar& g, std::span<const TaggedToken> tokens) {
  return ViterbiTable(g, tokens).run();
}

double tree_probability(const PcfgGrammar& g, const Tree& t) {
  Production local{t.node, {}};
  double inside = 1.0;
  for (const auto& child : t.children) {
    if (const auto* sub = std::get_if<Tree>(&child)) {
      local.rhs.push_back(Symbol::nt(sub->node));
      inside *= tree_probability(g, *sub);
    } else if (const auto* tok = std::get_if<TaggedToken>(&child)) {
      local.rhs.push_back(Symbol::term(tok->text));
    } else {
      throw UnknownProduction(t.node);
    }
  }
  const auto k = g.find(local);
  if (k == PcfgGrammar::npos) throw UnknownProduction(t.node);
  return g.prob(k) * inside;
}

}  // namespace nlkit
