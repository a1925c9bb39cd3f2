#include "nlkit/taggers.hpp"

#include <algorithm>
#include <cctype>

namespace nlkit {

RegexpTagger::RegexpTagger(std::vector<RegexpRule> rules) : rules_(std::move(rules)) {
  for (const auto& r : rules_) {
    try {
      compiled_.emplace_back(r.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw FormatError("bad tagger pattern '" + r.pattern + "': " + e.what());
    }
  }
}

std::optional<std::string> RegexpTagger::choose(const std::string& word) const {
  for (std::size_t k = 0; k < rules_.size(); ++k)
    if (std::regex_search(word, compiled_[k], std::regex_constants::match_continuous)) return rules_[k].tag;
  return std::nullopt;
}

std::optional<std::string> Tagger::choose(const std::string& word) const {
  struct Visitor {
    const std::string& word;
    std::optional<std::string> operator()(const DefaultTagger& d) const { return d.tag; }
    std::optional<std::string> operator()(const RegexpTagger& r) const { return r.choose(word); }
    std::optional<std::string> operator()(const UnigramTagger& u) const {
      const auto* fd = u.table.find(word);
      if (!fd || fd->empty()) return std::nullopt;
      return fd->max();
    }
  };
  return std::visit(Visitor{word}, kind_);
}

std::string Tagger::tag_word(const std::string& word) const {
  for (const Tagger* t = this; t != nullptr; t = t->backoff_.get())
    if (auto chosen = t->choose(word)) return *chosen;
  return std::string(kUnknownTag);
}

Tagger train_unigram(std::span<const Sentence> corpus, std::shared_ptr<const Tagger> backoff) {
  UnigramTagger u;
  std::size_t seen = 0;
  for (const auto& sentence : corpus)
    for (const auto& tok : sentence)
      if (tok.tag) {
        u.table.increment(tok.text, *tok.tag);
        ++seen;
      }
  if (seen == 0) throw EmptyCorpus();
  return Tagger(std::move(u), std::move(backoff));
}

Sentence tag(const Tagger& t, std::span<const TaggedToken> tokens) {
  Sentence out(tokens.begin(), tokens.end());
  for (auto& tok : out) tok.tag = t.tag_word(tok.text);
  return out;
}

double evaluate_tagger(const Tagger& t, std::span<const Sentence> gold) {
  std::size_t total = 0, right = 0;
  for (const auto& sentence : gold) {
    for (const auto& tok : sentence) {
      ++total;
      if (tok.tag && t.tag_word(tok.text) == *tok.tag) ++right;
    }
  }
  if (total == 0) throw EmptyCorpus();
  return static_cast<double>(right) / static_cast<double>(total);
}

TaggedCorpus read_tagged_corpus(std::string_view text) {
  TaggedCorpus out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    try {
      auto sentence = read_tagged(line);
      if (!sentence.empty()) out.push_back(std::move(sentence));
    } catch (const MalformedTaggedItem& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RegexpRule> regexp_rules_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("regexp tagger rules must be a JSON array");
  std::vector<RegexpRule> rules;
  try {
    for (const auto& r : j) rules.push_back({r.at("pattern").get<std::string>(), r.at("tag").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed regexp tagger rules: ") + e.what());
  }
  return rules;
}

nlohmann::json tagger_to_json(const Tagger& t) {
  nlohmann::json out;
  if (const auto* d = std::get_if<DefaultTagger>(&t.kind())) {
    out = {{"kind", "default"}, {"tag", d->tag}};
  } else if (const auto* r = std::get_if<RegexpTagger>(&t.kind())) {
    auto rules = nlohmann::json::array();
    for (const auto& rule : r->rules()) rules.push_back({{"pattern", rule.pattern}, {"tag", rule.tag}});
    out = {{"kind", "regexp"}, {"rules", rules}};
  } else {
    const auto& u = std::get<UnigramTagger>(t.kind());
    nlohmann::json table = nlohmann::json::object();
    for (const auto& [word, fd] : u.table.conditions()) table[word] = fd.counts();
    out = {{"kind", "unigram"}, {"table", table}};
  }
  if (t.backoff()) out["backoff"] = tagger_to_json(*t.backoff());
  return out;
}

Tagger tagger_from_json(const nlohmann::json& j) {
  try {
    std::shared_ptr<const Tagger> backoff;
    if (j.contains("backoff")) backoff = std::make_shared<const Tagger>(tagger_from_json(j.at("backoff")));
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "default") return Tagger(DefaultTagger{j.at("tag").get<std::string>()}, backoff);
    if (kind == "regexp") return Tagger(RegexpTagger(regexp_rules_from_json(j.at("rules"))), backoff);
    if (kind == "unigram") {
      UnigramTagger u;
      for (const auto& [word, counts] : j.at("table").items())
        for (const auto& [tag_name, count] : counts.items()) u.table.increment(word, tag_name, count.get<FreqDist::Count>());
      return Tagger(std::move(u), backoff);
    }
    throw FormatError("unknown tagger kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tagger model: ") + e.what());
  }
}

}  // namespace nlkit
