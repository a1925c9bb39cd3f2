#include "nlkit/fsa.hpp"

#include <deque>

namespace nlkit {

namespace {

void check_states(const AutomatonData& d) {
  if (d.start >= d.num_states) throw FormatError("start state out of range");
  for (auto f : d.finals)
    if (f >= d.num_states) throw FormatError("final state out of range");
  for (const auto& t : d.transitions) {
    if (t.from >= d.num_states || t.to >= d.num_states) throw FormatError("transition endpoint out of range");
    if (t.symbol && !d.alphabet.count(*t.symbol)) throw FormatError("transition symbol not in alphabet");
  }
}

}  // namespace

Nfa::Nfa(AutomatonData data) : data_(std::move(data)) {
  check_states(data_);
  outgoing_.resize(data_.num_states);
  for (std::size_t k = 0; k < data_.transitions.size(); ++k) outgoing_[data_.transitions[k].from].push_back(k);
}

std::set<StateId> Nfa::epsilon_closure(std::set<StateId> states) const {
  std::vector<StateId> work(states.begin(), states.end());
  while (!work.empty()) {
    const auto s = work.back();
    work.pop_back();
    for (auto k : outgoing_[s]) {
      const auto& t = data_.transitions[k];
      if (!t.symbol && states.insert(t.to).second) work.push_back(t.to);
    }
  }
  return states;
}

std::set<StateId> Nfa::move(const std::set<StateId>& states, char symbol) const {
  std::set<StateId> out;
  for (auto s : states)
    for (auto k : outgoing_[s]) {
      const auto& t = data_.transitions[k];
      if (t.symbol == symbol) out.insert(t.to);
    }
  return out;
}

bool is_deterministic(const AutomatonData& data) {
  std::set<std::pair<StateId, char>> seen;
  for (const auto& t : data.transitions) {
    if (!t.symbol) return false;
    if (!seen.emplace(t.from, *t.symbol).second) return false;
  }
  return true;
}

Dfa::Dfa(AutomatonData data, std::vector<std::set<StateId>> labels)
    : data_(std::move(data)), labels_(std::move(labels)) {
  check_states(data_);
  if (!is_deterministic(data_)) throw FormatError("automaton is not deterministic");
  for (const auto& t : data_.transitions) delta_[{t.from, *t.symbol}] = t.to;
}

std::optional<StateId> Dfa::next(StateId s, char symbol) const {
  auto it = delta_.find({s, symbol});
  if (it == delta_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct Fragment {
  StateId start;
  StateId accept;
};

class ThompsonBuilder {
 public:
  explicit ThompsonBuilder(std::string_view re) : re_(re) {}

  Nfa build() {
    if (re_.empty()) throw RegexSyntax(0, "empty regex");
    const auto f = alternation();
    if (pos_ < re_.size()) throw RegexSyntax(pos_, std::string("unexpected '") + re_[pos_] + "'");
    data_.start = f.start;
    data_.finals = {f.accept};
    return Nfa(std::move(data_));
  }

 private:
  StateId new_state() { return data_.num_states++; }
  void edge(StateId from, std::optional<char> sym, StateId to) { data_.transitions.push_back({from, sym, to}); }

  bool at_end() const { return pos_ >= re_.size(); }

  Fragment alternation() {
    auto left = concatenation();
    while (!at_end() && re_[pos_] == '|') {
      ++pos_;
      auto right = concatenation();
      const auto s = new_state(), f = new_state();
      edge(s, std::nullopt, left.start);
      edge(s, std::nullopt, right.start);
      edge(left.accept, std::nullopt, f);
      edge(right.accept, std::nullopt, f);
      left = {s, f};
    }
    return left;
  }

  Fragment concatenation() {
    if (at_end() || re_[pos_] == '|' || re_[pos_] == ')') throw RegexSyntax(pos_, "expected a symbol or '('");
    auto left = repetition();
    while (!at_end() && re_[pos_] != '|' && re_[pos_] != ')') {
      auto right = repetition();
      edge(left.accept, std::nullopt, right.start);
      left = {left.start, right.accept};
    }
    return left;
  }

  Fragment repetition() {
    auto inner = atom();
    while (!at_end() && (re_[pos_] == '*' || re_[pos_] == '+' || re_[pos_] == '?')) {
      const char op = re_[pos_++];
      const auto s = new_state(), f = new_state();
      edge(s, std::nullopt, inner.start);
      if (op != '+') edge(s, std::nullopt, f);
      if (op != '?') edge(inner.accept, std::nullopt, inner.start);
      edge(inner.accept, std::nullopt, f);
      inner = {s, f};
    }
    return inner;
  }

  Fragment atom() {
    if (at_end()) throw RegexSyntax(pos_, "unexpected end of regex");
    char c = re_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = alternation();
      if (at_end() || re_[pos_] != ')') throw RegexSyntax(pos_, "expected ')'");
      ++pos_;
      return inner;
    }
    if (c == '*' || c == '+' || c == '?' || c == ')' || c == '|')
      throw RegexSyntax(pos_, std::string("unexpected '") + c + "'");
    if (c == '\\') {
      if (pos_ + 1 >= re_.size()) throw RegexSyntax(pos_ + 1, "dangling escape");
      c = re_[++pos_];
    }
    ++pos_;
    data_.alphabet.insert(c);
    const auto s = new_state(), f = new_state();
    edge(s, c, f);
    return {s, f};
  }

  std::string_view re_;
  std::size_t pos_ = 0;
  AutomatonData data_;
};

}  // namespace

Nfa regex_to_nfa(std::string_view regex) { return ThompsonBuilder(regex).build(); }

Dfa nfa_to_dfa(const Nfa& n) {
  const auto& nd = n.data();
  std::set<StateId> important(nd.finals.begin(), nd.finals.end());
  for (const auto& t : nd.transitions)
    if (t.symbol) important.insert(t.from);
  auto kernel = [&](const std::set<StateId>& closure) {
    std::set<StateId> out;
    for (auto s : closure)
      if (important.count(s)) out.insert(s);
    return out;
  };

  AutomatonData out;
  out.alphabet = nd.alphabet;
  std::vector<std::set<StateId>> labels;
  std::map<std::set<StateId>, StateId> ids;
  std::deque<StateId> queue;

  auto intern = [&](std::set<StateId> key) {
    auto [it, inserted] = ids.emplace(key, labels.size());
    if (inserted) {
      for (auto s : key)
        if (nd.finals.count(s)) {
          out.finals.insert(labels.size());
          break;
        }
      labels.push_back(std::move(key));
      queue.push_back(it->second);
    }
    return it->second;
  };

  out.start = intern(kernel(n.epsilon_closure({nd.start})));
  while (!queue.empty()) {
    const auto d = queue.front();
    queue.pop_front();
    const auto current = labels[d];
    for (char sym : nd.alphabet) {
      auto target = kernel(n.epsilon_closure(n.move(current, sym)));
      if (target.empty()) continue;
      const auto to = intern(std::move(target));
      out.transitions.push_back({d, sym, to});
    }
  }
  out.num_states = labels.size();
  return Dfa(std::move(out), std::move(labels));
}

SimResult simulate(const Nfa& m, std::string_view input) {
  SimResult r;
  auto active = m.epsilon_closure({m.start()});
  r.trace.push_back({0, active});
  for (std::size_t k = 0; k < input.size() && !active.empty(); ++k) {
    active = m.epsilon_closure(m.move(active, input[k]));
    r.trace.push_back({k + 1, active});
  }
  if (r.trace.size() == input.size() + 1)
    for (auto s : active)
      if (m.finals().count(s)) r.accepted = true;
  return r;
}

SimResult simulate(const Dfa& m, std::string_view input) {
  SimResult r;
  std::optional<StateId> state = m.start();
  r.trace.push_back({0, {*state}});
  for (std::size_t k = 0; k < input.size() && state; ++k) {
    state = m.next(*state, input[k]);
    r.trace.push_back({k + 1, state ? std::set<StateId>{*state} : std::set<StateId>{}});
  }
  r.accepted = state && r.trace.size() == input.size() + 1 && m.is_final(*state);
  return r;
}

nlohmann::json automaton_to_json(const AutomatonData& data) {
  auto states = nlohmann::json::array();
  for (StateId s = 0; s < data.num_states; ++s) states.push_back(s);
  auto alphabet = nlohmann::json::array();
  for (char c : data.alphabet) alphabet.push_back(std::string(1, c));
  auto transitions = nlohmann::json::array();
  for (const auto& t : data.transitions)
    transitions.push_back({{"from", t.from},
                           {"symbol", t.symbol ? nlohmann::json(std::string(1, *t.symbol)) : nlohmann::json(nullptr)},
                           {"to", t.to}});
  return {{"states", states}, {"alphabet", alphabet}, {"transitions", transitions},
          {"start", data.start}, {"finals", data.finals}};
}

AutomatonData automaton_from_json(const nlohmann::json& j) {
  try {
    AutomatonData d;
    d.num_states = j.at("states").size();
    const auto states = j.at("states").get<std::vector<StateId>>();
    for (std::size_t k = 0; k < states.size(); ++k)
      if (states[k] != k) throw FormatError("states must be numbered 0..n-1");
    for (const auto& a : j.at("alphabet")) {
      const auto s = a.get<std::string>();
      if (s.size() != 1) throw FormatError("alphabet symbols must be single characters");
      d.alphabet.insert(s[0]);
    }
    for (const auto& t : j.at("transitions")) {
      Transition tr{t.at("from").get<StateId>(), std::nullopt, t.at("to").get<StateId>()};
      if (!t.at("symbol").is_null()) {
        const auto s = t.at("symbol").get<std::string>();
        if (s.size() != 1) throw FormatError("transition symbols must be single characters");
        tr.symbol = s[0];
      }
      d.transitions.push_back(tr);
    }
    d.start = j.at("start").get<StateId>();
    d.finals = j.at("finals").get<std::set<StateId>>();
    check_states(d);
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed automaton: ") + e.what());
  }
}

}  // namespace nlkit
