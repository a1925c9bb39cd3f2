#include "nlkit/chart.hpp"

#include <algorithm>
#include <functional>

namespace nlkit {

namespace {

constexpr std::pair<ChartRuleKind, std::string_view> kRuleNames[] = {
    {ChartRuleKind::TopDownInit, "TopDownInit"},
    {ChartRuleKind::TopDownPredict, "TopDownPredict"},
    {ChartRuleKind::BottomUpPredict, "BottomUpPredict"},
    {ChartRuleKind::Fundamental, "Fundamental"},
    {ChartRuleKind::LexicalInsert, "LexicalInsert"},
};

}  // namespace

std::string_view rule_name(ChartRuleKind kind) {
  for (const auto& [k, name] : kRuleNames)
    if (k == kind) return name;
  return "?";
}

ChartRuleKind parse_rule_kind(std::string_view name) {
  for (const auto& [k, n] : kRuleNames)
    if (n == name) return k;
  throw FormatError("unknown chart rule '" + std::string(name) + "'");
}

std::string Edge::str() const {
  std::string out = "[" + std::to_string(start) + "," + std::to_string(end) + "] ";
  if (leaf) return out + Symbol::term(production.lhs).str();
  out += production.lhs + " ->";
  for (std::size_t k = 0; k <= production.rhs.size(); ++k) {
    if (k == dot) out += " *";
    if (k < production.rhs.size()) out += " " + production.rhs[k].str();
  }
  return out;
}

Chart::Chart(Sentence tokens) : tokens_(std::move(tokens)), complete_by_start_(tokens_.size() + 1) {}

const Edge& Chart::edge(EdgeId id) const {
  if (id >= edges_.size()) throw UnknownEdgeId(id);
  return edges_[id];
}

std::optional<EdgeId> Chart::find(const Edge& e) const {
  auto it = index_.find(Key(e.key()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::pair<EdgeId, bool> Chart::insert(Edge e) {
  auto [it, inserted] = index_.emplace(Key(e.key()), edges_.size());
  if (!inserted) return {it->second, false};
  if (e.is_complete()) complete_by_start_.at(e.start).push_back(edges_.size());
  edges_.push_back(std::move(e));
  return {edges_.size() - 1, true};
}

Chart Chart::truncated(std::size_t count) const {
  Chart out(tokens_);
  for (std::size_t k = 0; k < std::min(count, edges_.size()); ++k) out.insert(edges_[k]);
  return out;
}

Strategy Strategy::top_down() {
  return {Name::TopDown,
          {ChartRuleKind::TopDownInit, ChartRuleKind::LexicalInsert, ChartRuleKind::TopDownPredict,
           ChartRuleKind::Fundamental}};
}

Strategy Strategy::bottom_up() {
  return {Name::BottomUp,
          {ChartRuleKind::LexicalInsert, ChartRuleKind::BottomUpPredict, ChartRuleKind::Fundamental}};
}

std::string_view strategy_name(Strategy::Name n) {
  return n == Strategy::Name::TopDown ? "TopDown" : "BottomUp";
}

Strategy::Name parse_strategy_name(std::string_view name) {
  if (name == "TopDown" || name == "td" || name == "top-down") return Strategy::Name::TopDown;
  if (name == "BottomUp" || name == "bu" || name == "bottom-up") return Strategy::Name::BottomUp;
  throw FormatError("unknown strategy '" + std::string(name) + "'");
}

Chart chart_init(const Grammar& g, Sentence tokens) {
  auto missing = check_coverage(g, tokens);
  if (!missing.empty()) throw UncoveredTokens(std::move(missing));
  g.require_acyclic();
  for (std::size_t k = 0; k < tokens.size(); ++k) tokens[k].loc = Location{k, k + 1, tokens[k].loc.source};
  return Chart(std::move(tokens));
}

namespace {

// Receives candidate edges in generation order; returning false stops the
// enumeration.
using Emit = std::function<bool(Edge&&)>;

bool is_selected(const std::set<EdgeId>* selected, EdgeId id) {
  return selected == nullptr || selected->count(id) > 0;
}

// Terminals that are consumed through leaf edges.
std::set<std::string> mixed_terminals(const Grammar& g) {
  std::set<std::string> out;
  for (const auto& p : g.productions())
    if (!p.is_lexical())
      for (const auto& s : p.rhs)
        if (s.terminal) out.insert(s.name);
  return out;
}

bool top_down_init(const Chart&, const Grammar& g, const Emit& emit) {
  for (auto k : g.expansions(g.start())) {
    const auto& p = g.productions()[k];
    if (p.is_lexical()) continue;
    if (!emit(Edge{0, 0, p, 0, {}, false})) return false;
  }
  return true;
}

bool lexical_insert(const Chart& c, const Grammar& g, const Emit& emit) {
  const auto& tokens = c.tokens();
  const auto leaves = mixed_terminals(g);
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    for (const auto& p : g.productions()) {
      if (!p.is_lexical() || k + p.rhs.size() > tokens.size()) continue;
      bool match = true;
      for (std::size_t m = 0; m < p.rhs.size() && match; ++m) match = p.rhs[m].name == tokens[k + m].text;
      if (match && !emit(Edge{k, k + p.rhs.size(), p, p.rhs.size(), {}, false})) return false;
    }
    if (leaves.count(tokens[k].text) &&
        !emit(Edge{k, k + 1, Production{tokens[k].text, {}}, 0, {}, true}))
      return false;
  }
  return true;
}

bool top_down_predict(const Chart& c, const Grammar& g, const std::set<EdgeId>* selected,
                      std::size_t limit, const Emit& emit) {
  for (EdgeId id = 0; id < limit; ++id) {
    const auto& e = c.edges()[id];
    if (e.is_complete() || e.next_symbol().terminal || !is_selected(selected, id)) continue;
    for (auto k : g.expansions(e.next_symbol().name)) {
      const auto& p = g.productions()[k];
      if (p.is_lexical()) continue;
      if (!emit(Edge{e.end, e.end, p, 0, {}, false})) return false;
    }
  }
  return true;
}

bool bottom_up_predict(const Chart& c, const Grammar& g, const std::set<EdgeId>* selected,
                       std::size_t limit, const Emit& emit) {
  for (EdgeId id = 0; id < limit; ++id) {
    const auto& e = c.edges()[id];
    if (!e.is_complete() || !is_selected(selected, id)) continue;
    const auto sym = e.lhs_symbol();
    for (const auto& p : g.productions()) {
      if (p.is_lexical() || p.rhs.front() != sym) continue;
      if (!emit(Edge{e.start, e.start, p, 0, {}, false})) return false;
    }
  }
  return true;
}

bool fundamental(const Chart& c, const std::set<EdgeId>* selected, std::size_t limit,
                 const Emit& emit) {
  for (EdgeId left = 0; left < limit; ++left) {
    const auto& e = c.edges()[left];
    if (e.is_complete()) continue;
    const auto& want = e.next_symbol();
    for (EdgeId right : c.complete_at(e.end)) {
      if (right >= limit) break;
      const auto& f = c.edges()[right];
      if (f.lhs_symbol() != want) continue;
      if (selected && !selected->count(left) && !selected->count(right)) continue;
      Edge next{e.start, f.end, e.production, e.dot + 1, e.children, false};
      next.children.push_back(right);
      if (!emit(std::move(next))) return false;
    }
  }
  return true;
}

void enumerate(const Chart& c, const Grammar& g, ChartRuleKind kind, const std::set<EdgeId>* selected,
               std::size_t limit, const Emit& emit) {
  switch (kind) {
    case ChartRuleKind::TopDownInit: top_down_init(c, g, emit); break;
    case ChartRuleKind::LexicalInsert: lexical_insert(c, g, emit); break;
    case ChartRuleKind::TopDownPredict: top_down_predict(c, g, selected, limit, emit); break;
    case ChartRuleKind::BottomUpPredict: bottom_up_predict(c, g, selected, limit, emit); break;
    case ChartRuleKind::Fundamental: fundamental(c, selected, limit, emit); break;
  }
}

}  // namespace

std::vector<EdgeId> apply_rule(Chart& c, const Grammar& g, ChartRuleKind kind,
                               const std::optional<std::set<EdgeId>>& selected) {
  if (selected)
    for (auto id : *selected) c.edge(id);

  std::vector<Edge> candidates;
  enumerate(c, g, kind, selected ? &*selected : nullptr, c.size(), [&](Edge&& e) {
    candidates.push_back(std::move(e));
    return true;
  });
  std::vector<EdgeId> added;
  for (auto& e : candidates) {
    auto [id, inserted] = c.insert(std::move(e));
    if (inserted) added.push_back(id);
  }
  return added;
}

std::optional<StepResult> step(Chart& c, const Grammar& g, const Strategy& s) {
  for (auto kind : s.ordering) {
    std::optional<Edge> fresh;
    enumerate(c, g, kind, nullptr, c.size(), [&](Edge&& e) {
      if (c.find(e)) return true;
      fresh = std::move(e);
      return false;
    });
    if (fresh) return StepResult{kind, c.insert(std::move(*fresh)).first};
  }
  return std::nullopt;
}

std::size_t run_to_fixpoint(Chart& c, const Grammar& g, const Strategy& s) {
  std::size_t added = 0;
  while (step(c, g, s)) ++added;
  return added;
}

namespace {

Tree build_tree(const Chart& c, EdgeId id, bool partial) {
  const auto& e = c.edge(id);
  Tree t(e.production.lhs);
  if (e.leaf) return t;
  if (e.children.empty() && e.is_complete()) {
    // Lexical edge: the covered tokens are the leaves.
    for (auto k = e.start; k < e.end; ++k) t.children.emplace_back(c.tokens()[k]);
    return t;
  }
  for (auto child : e.children) {
    const auto& ce = c.edge(child);
    if (ce.leaf)
      t.children.emplace_back(c.tokens()[ce.start]);
    else
      t.children.emplace_back(build_tree(c, child, false));
  }
  if (partial)
    for (auto k = e.dot; k < e.production.rhs.size(); ++k)
      t.children.emplace_back(Placeholder{e.production.rhs[k].str()});
  return t;
}

}  // namespace

std::vector<Tree> extract_parses(const Chart& c, const Grammar& g) {
  std::set<Tree> trees;
  for (auto id : c.complete_at(0)) {
    const auto& e = c.edges()[id];
    if (e.leaf || e.end != c.num_leaves() || e.production.lhs != g.start()) continue;
    trees.insert(build_tree(c, id, false));
  }
  return {trees.begin(), trees.end()};
}

Tree tree_for_edge(const Chart& c, EdgeId id) { return build_tree(c, id, true); }

nlohmann::json edge_to_json(const Chart& c, EdgeId id) {
  const auto& e = c.edge(id);
  nlohmann::json rhs = nlohmann::json::array();
  for (const auto& s : e.production.rhs) rhs.push_back(s.str());
  return {{"id", id},
          {"i", e.start},
          {"j", e.end},
          {"lhs", e.leaf ? Symbol::term(e.production.lhs).str() : e.production.lhs},
          {"rhs", rhs},
          {"dot", e.dot},
          {"children", e.children}};
}

nlohmann::json chart_to_json(const Grammar& g, const Chart& c) {
  nlohmann::json edges = nlohmann::json::array();
  for (EdgeId id = 0; id < c.size(); ++id) edges.push_back(edge_to_json(c, id));
  return {{"grammar", format_cfg(g)}, {"tokens", words_of(c.tokens())}, {"edges", edges}};
}

namespace {

Symbol parse_symbol_text(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
    return Symbol::term(s.substr(1, s.size() - 2));
  if (s.empty()) throw FormatError("empty symbol in snapshot");
  return Symbol::nt(s);
}

}  // namespace

ChartSnapshot chart_from_json(const nlohmann::json& j) {
  try {
    auto grammar = parse_cfg(j.at("grammar").get<std::string>());
    Sentence tokens;
    for (const auto& w : j.at("tokens")) {
      const auto k = tokens.size();
      tokens.push_back(TaggedToken{w.get<std::string>(), std::nullopt, Location{k, k + 1, {}}});
    }
    Chart chart = chart_init(grammar, std::move(tokens));
    const auto n = chart.num_leaves();
    for (const auto& je : j.at("edges")) {
      const auto id = je.at("id").get<EdgeId>();
      if (id != chart.size()) throw FormatError("edge ids must be consecutive from 0");
      const auto lhs = parse_symbol_text(je.at("lhs").get<std::string>());
      Edge e;
      e.start = je.at("i").get<std::size_t>();
      e.end = je.at("j").get<std::size_t>();
      e.dot = je.at("dot").get<std::size_t>();
      e.children = je.at("children").get<std::vector<EdgeId>>();
      e.leaf = lhs.terminal;
      e.production.lhs = lhs.name;
      for (const auto& s : je.at("rhs")) e.production.rhs.push_back(parse_symbol_text(s.get<std::string>()));

      const auto where = "edge " + std::to_string(id) + ": ";
      if (e.start > e.end || e.end > n) throw FormatError(where + "span out of range");
      if (e.dot > e.production.rhs.size()) throw FormatError(where + "dot out of range");
      if (e.leaf) {
        if (!e.production.rhs.empty() || e.dot != 0 || !e.children.empty() || e.end != e.start + 1 ||
            chart.tokens()[e.start].text != e.production.lhs)
          throw FormatError(where + "bad leaf edge");
      } else {
        const auto& prods = grammar.productions();
        if (std::find(prods.begin(), prods.end(), e.production) == prods.end())
          throw FormatError(where + "production not in grammar");
        const bool lexical = e.production.is_lexical() && e.children.empty();
        if (lexical) {
          if (e.dot != e.production.rhs.size() || e.end - e.start != e.dot)
            throw FormatError(where + "bad lexical edge");
          for (std::size_t m = 0; m < e.dot; ++m)
            if (chart.tokens()[e.start + m].text != e.production.rhs[m].name)
              throw FormatError(where + "lexical edge does not match tokens");
        } else {
          if (e.children.size() != e.dot) throw FormatError(where + "children do not match dot");
          std::size_t pos = e.start;
          for (std::size_t m = 0; m < e.children.size(); ++m) {
            if (e.children[m] >= id) throw FormatError(where + "child refers forward");
            const auto& ce = chart.edge(e.children[m]);
            if (!ce.is_complete() || ce.start != pos || ce.lhs_symbol() != e.production.rhs[m])
              throw FormatError(where + "child does not fit");
            pos = ce.end;
          }
          if (pos != e.end) throw FormatError(where + "children do not cover span");
        }
      }
      if (!chart.insert(std::move(e)).second) throw FormatError(where + "duplicate edge");
    }
    return ChartSnapshot{std::move(grammar), std::move(chart)};
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed chart snapshot: ") + ex.what());
  }
}

}  // namespace nlkit
