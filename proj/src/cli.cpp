#include "nlkit/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlkit/chart.hpp"
#include "nlkit/chunker.hpp"
#include "nlkit/classify.hpp"
#include "nlkit/fsa.hpp"
#include "nlkit/parsers.hpp"
#include "nlkit/session.hpp"
#include "nlkit/taggers.hpp"

namespace nlkit {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error("cannot write '" + path + "'");
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string exact(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string child_str(const Tree::Child& c) {
  if (const auto* t = std::get_if<Tree>(&c)) return to_bracketed(*t);
  if (const auto* tok = std::get_if<TaggedToken>(&c)) return tok->text;
  return std::get<Placeholder>(c).symbol + "?";
}

std::string state_set(const std::set<StateId>& states) {
  std::string out = "{";
  for (auto s : states) {
    if (out.size() > 1) out += ',';
    out += std::to_string(s);
  }
  return out + "}";
}

void print_spans(std::ostream& out, const char* label, const std::vector<SentenceSpan>& spans,
                 std::span<const ChunkStructure> corpus) {
  for (const auto& s : spans) {
    const auto& toks = corpus[s.sentence].tokens;
    std::span<const TaggedToken> words(toks.data() + s.span.start, s.span.end - s.span.start);
    out << label << " sentence=" << s.sentence << " span=[" << s.span.start << "," << s.span.end << ") "
        << format_tagged(words) << "\n";
  }
}

int chunk_eval(const std::string& cascade_path, const std::string& gold_path, std::ostream& out) {
  const auto rules = compile_cascade(cascade_from_json(read_json(cascade_path)));
  const auto gold = read_gold_corpus(read_file(gold_path));
  std::vector<ChunkStructure> test;
  for (const auto& g : gold) test.push_back(apply_cascade(unchunk(g), rules));
  const auto score = score_corpus(gold, test);
  out << "precision=" << fixed(score.precision()) << " recall=" << fixed(score.recall())
      << " f1=" << fixed(score.f1()) << "\n";
  out << "correct=" << score.correct << " guessed=" << score.guessed << " gold=" << score.gold << "\n";
  print_spans(out, "missed", score.missed, gold);
  print_spans(out, "incorrect", score.incorrect, test);
  return 0;
}

int chunk_rates(const std::string& gold_path, double threshold, const std::string& out_path, std::ostream& out) {
  const auto gold = read_gold_corpus(read_file(gold_path));
  const auto rates = np_tag_rates(gold);
  for (const auto& [tag_name, rate] : rates) out << tag_name << " " << fixed(rate) << "\n";
  const auto rule = rule_from_tag_rates(rates, threshold);
  out << "rule " << chunk_rule_name(rule.kind) << " " << rule.patterns.front() << "\n";
  if (!out_path.empty()) {
    const std::vector<ChunkRuleSpec> cascade{rule};
    write_file(out_path, cascade_to_json(cascade).dump(2) + "\n");
  }
  return 0;
}

int chunk_apply(const std::string& cascade_path, const std::string& input_path, std::ostream& out) {
  const auto rules = compile_cascade(cascade_from_json(read_json(cascade_path)));
  for (const auto& sentence : read_tagged_corpus(read_file(input_path)))
    out << format_gold_line(apply_cascade(ChunkStructure{sentence, {}}, rules)) << "\n";
  return 0;
}

int tag_train(const std::string& corpus_path, const std::string& regexp_path, const std::string& default_tag,
              const std::string& out_path, std::ostream& out) {
  std::shared_ptr<const Tagger> backoff;
  if (!default_tag.empty()) backoff = std::make_shared<const Tagger>(DefaultTagger{default_tag});
  if (!regexp_path.empty())
    backoff = std::make_shared<const Tagger>(RegexpTagger(regexp_rules_from_json(read_json(regexp_path))), backoff);
  const auto corpus = read_tagged_corpus(read_file(corpus_path));
  const auto tagger = train_unigram(corpus, backoff);
  write_file(out_path, tagger_to_json(tagger).dump(2) + "\n");
  out << "trained on " << corpus.size() << " sentences\n";
  return 0;
}

int tag_eval(const std::string& model_path, const std::string& gold_path, std::ostream& out) {
  const auto tagger = tagger_from_json(read_json(model_path));
  const auto gold = read_tagged_corpus(read_file(gold_path));
  out << "accuracy=" << fixed(evaluate_tagger(tagger, gold)) << "\n";
  return 0;
}

int tag_apply(const std::string& model_path, const std::string& sentence, std::ostream& out) {
  const auto tagger = tagger_from_json(read_json(model_path));
  out << format_tagged(tag(tagger, tokenize_whitespace(sentence))) << "\n";
  return 0;
}

int chart_parse(const std::string& grammar_path, const std::string& strategy, const std::string& sentence,
                std::ostream& out, std::ostream& err) {
  const auto g = parse_cfg(read_file(grammar_path));
  auto chart = chart_init(g, tokenize_whitespace(sentence));
  run_to_fixpoint(chart, g, Strategy::from_name(parse_strategy_name(strategy)));
  const auto parses = extract_parses(chart, g);
  for (const auto& t : parses) out << to_bracketed(t) << "\n";
  if (parses.empty()) err << "no parse\n";
  return 0;
}

int pcfg_parse(const std::string& grammar_path, const std::string& sentence, std::ostream& out,
               std::ostream& err) {
  const auto g = parse_pcfg(read_file(grammar_path));
  const auto tokens = tokenize_whitespace(sentence);
  if (auto missing = check_coverage(g.cfg(), tokens); !missing.empty()) throw UncoveredTokens(missing);
  const auto best = viterbi_parse(g, tokens);
  if (!best) {
    err << "no parse\n";
    return 0;
  }
  out << to_bracketed(best->tree) << " p=" << exact(best->prob) << "\n";
  return 0;
}

int sr_command(const std::string& grammar_path, bool trace, const std::string& sentence, std::ostream& out,
               std::ostream& err) {
  const auto g = parse_cfg(read_file(grammar_path));
  const auto tokens = tokenize_whitespace(sentence);
  if (auto missing = check_coverage(g, tokens); !missing.empty()) throw UncoveredTokens(missing);
  const auto r = sr_parse(g, tokens);
  if (trace) {
    for (const auto& s : r.trace) {
      out << s.action.str() << " | stack:";
      for (const auto& c : s.stack_after) out << " " << child_str(c);
      out << " | remaining " << s.remaining << "\n";
    }
  }
  if (r.tree)
    out << to_bracketed(*r.tree) << "\n";
  else
    err << "no parse\n";
  return 0;
}

int fsa_compile(const std::string& regex, bool dfa, const std::string& out_path, std::ostream& out) {
  const auto nfa = regex_to_nfa(regex);
  const auto j = dfa ? automaton_to_json(nfa_to_dfa(nfa).data()) : automaton_to_json(nfa.data());
  if (out_path.empty())
    out << j.dump(2) << "\n";
  else
    write_file(out_path, j.dump(2) + "\n");
  return 0;
}

int fsa_simulate(const std::string& regex, const std::string& automaton_path, bool dfa, const std::string& input,
                 std::ostream& out) {
  SimResult r;
  if (!automaton_path.empty()) {
    auto data = automaton_from_json(read_json(automaton_path));
    if (is_deterministic(data))
      r = simulate(Dfa(std::move(data)), input);
    else
      r = simulate(Nfa(std::move(data)), input);
  } else {
    const auto nfa = regex_to_nfa(regex);
    r = dfa ? simulate(nfa_to_dfa(nfa), input) : simulate(nfa, input);
  }
  for (const auto& s : r.trace) out << s.position << " " << state_set(s.active) << "\n";
  out << (r.accepted ? "accepted" : "rejected") << "\n";
  return 0;
}

struct ClassifyTrainArgs {
  std::string corpus;
  std::string out;
  std::string algorithm = "nb";
  std::size_t cutoff = 1;
  std::size_t budget = 1000;
  double gamma = 1.0;
  std::size_t max_iter = 100;
  double tol = 1e-4;
};

int classify_train(const ClassifyTrainArgs& a, std::ostream& out) {
  const auto corpus = read_labeled_corpus(read_file(a.corpus));
  const auto data = make_dataset(corpus, select_features(corpus, a.cutoff, a.budget));
  nlohmann::json model;
  if (a.algorithm == "nb") {
    model = model_to_json(train_naive_bayes(data, a.gamma));
    out << "naive bayes: " << data.classes.size() << " classes, " << data.vocabulary.size() << " features\n";
  } else {
    MaxentOptions opts{parse_maxent_algorithm(a.algorithm), a.max_iter, a.tol};
    const auto m = train_maxent(data, opts);
    model = model_to_json(m);
    out << maxent_algorithm_name(opts.algorithm) << ": " << m.log().iterations << " iterations, violation "
        << exact(m.log().final_violation()) << (m.log().converged ? "" : " (not converged)") << "\n";
  }
  write_file(a.out, model.dump(2) + "\n");
  return 0;
}

int classify_predict(const std::string& model_path, const std::vector<std::string>& texts, std::ostream& out) {
  const auto model = model_from_json(read_json(model_path));
  const auto& [classes, vocab] = std::visit(
      [](const auto& m) { return std::pair{m.classes(), m.vocabulary()}; }, model);
  for (const auto& text : texts) {
    const auto words = words_of(tokenize_whitespace(text));
    const auto post = classify(model, encode(words, vocab));
    out << classes[post.label];
    for (std::size_t c = 0; c < classes.size(); ++c) out << " " << classes[c] << "=" << fixed(post.probs[c], 6);
    out << "\n";
  }
  return 0;
}

int session_replay(const std::string& transcript_path, const std::string& presets_path, std::ostream& out) {
  SessionService service(presets_path.empty() ? std::vector<Preset>{} : presets_from_json(read_json(presets_path)));
  const auto transcript = read_json(transcript_path);
  if (!transcript.is_array()) throw FormatError("transcript must be a JSON array");
  for (const auto& req : transcript) {
    try {
      const auto body = req.contains("body") ? req.at("body").dump() : std::string();
      const auto r = service.handle(req.at("method").get<std::string>(), req.at("path").get<std::string>(), body);
      out << r.status << " " << r.body.dump() << "\n";
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed transcript entry: ") + e.what());
    }
  }
  return 0;
}

int serve(const std::string& host, int port, const std::string& presets_path, std::ostream& out) {
  SessionService service(presets_path.empty() ? std::vector<Preset>{} : presets_from_json(read_json(presets_path)));
  out << "listening on http://" << host << ":" << port << "/api/v1/\n" << std::flush;
  serve_http(service, host, port);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Teaching toolkit for natural language processing", "nlkit"};
  app.require_subcommand(1);

  std::string cascade, gold, input, out_path, grammar, strategy = "td", sentence, corpus, model, regexp_rules,
                                                  default_tag, regex, automaton, transcript, presets,
                                                  host = "127.0.0.1";
  double threshold = 0.5;
  bool trace = false, dfa = false;
  int port = 8080;
  std::vector<std::string> texts;
  ClassifyTrainArgs ct;

  auto* chunk = app.add_subcommand("chunk", "Regular-expression chunking");
  chunk->require_subcommand(1);
  auto* chunk_eval_cmd = chunk->add_subcommand("eval", "Score a cascade against a gold corpus");
  chunk_eval_cmd->add_option("--cascade", cascade, "Cascade JSON file")->required();
  chunk_eval_cmd->add_option("--gold", gold, "Gold chunk corpus")->required();
  auto* chunk_rates_cmd = chunk->add_subcommand("rates", "Per-tag chunk rates and the rule they suggest");
  chunk_rates_cmd->add_option("--gold", gold, "Gold chunk corpus")->required();
  chunk_rates_cmd->add_option("--threshold", threshold, "Minimum rate for a tag to join the rule");
  chunk_rates_cmd->add_option("--out", out_path, "Write the rule as a cascade file");
  auto* chunk_apply_cmd = chunk->add_subcommand("apply", "Chunk tagged sentences, one per line");
  chunk_apply_cmd->add_option("--cascade", cascade, "Cascade JSON file")->required();
  chunk_apply_cmd->add_option("--input", input, "Tagged sentences")->required();

  auto* tag_cmd = app.add_subcommand("tag", "Part-of-speech tagging");
  tag_cmd->require_subcommand(1);
  auto* tag_train_cmd = tag_cmd->add_subcommand("train", "Train a unigram tagger");
  tag_train_cmd->add_option("--corpus", corpus, "Tagged training corpus")->required();
  tag_train_cmd->add_option("--regexp", regexp_rules, "Regexp backoff rules (JSON)");
  tag_train_cmd->add_option("--default", default_tag, "Final backoff tag");
  tag_train_cmd->add_option("--out", out_path, "Model file to write")->required();
  auto* tag_eval_cmd = tag_cmd->add_subcommand("eval", "Tagging accuracy on a gold corpus");
  tag_eval_cmd->add_option("--model", model, "Tagger model")->required();
  tag_eval_cmd->add_option("--gold", gold, "Tagged gold corpus")->required();
  auto* tag_apply_cmd = tag_cmd->add_subcommand("apply", "Tag one sentence");
  tag_apply_cmd->add_option("--model", model, "Tagger model")->required();
  tag_apply_cmd->add_option("sentence", sentence, "Words separated by spaces")->required();

  auto* parse_cmd = app.add_subcommand("parse", "Chart parse and print every tree");
  parse_cmd->add_option("--grammar", grammar, "Grammar file")->required();
  parse_cmd->add_option("--strategy", strategy, "td or bu");
  parse_cmd->add_option("sentence", sentence, "Words separated by spaces")->required();

  auto* pcfg_cmd = app.add_subcommand("pcfg", "Probabilistic parsing");
  pcfg_cmd->require_subcommand(1);
  auto* pcfg_parse_cmd = pcfg_cmd->add_subcommand("parse", "Most probable parse");
  pcfg_parse_cmd->add_option("--grammar", grammar, "Weighted grammar file")->required();
  pcfg_parse_cmd->add_option("sentence", sentence, "Words separated by spaces")->required();

  auto* sr_cmd = app.add_subcommand("sr", "Shift-reduce parsing");
  sr_cmd->require_subcommand(1);
  auto* sr_parse_cmd = sr_cmd->add_subcommand("parse", "Greedy shift-reduce parse");
  sr_parse_cmd->add_option("--grammar", grammar, "Grammar file")->required();
  sr_parse_cmd->add_flag("--trace", trace, "Print every action");
  sr_parse_cmd->add_option("sentence", sentence, "Words separated by spaces")->required();

  auto* fsa_cmd = app.add_subcommand("fsa", "Finite-state automata");
  fsa_cmd->require_subcommand(1);
  auto* fsa_compile_cmd = fsa_cmd->add_subcommand("compile", "Regex to automaton JSON");
  fsa_compile_cmd->add_option("--regex", regex, "Regular expression")->required();
  fsa_compile_cmd->add_flag("--dfa", dfa, "Determinize the result");
  fsa_compile_cmd->add_option("--out", out_path, "File to write");
  auto* fsa_sim_cmd = fsa_cmd->add_subcommand("simulate", "Run an automaton and print its trace");
  auto* regex_opt = fsa_sim_cmd->add_option("--regex", regex, "Regular expression");
  auto* automaton_opt = fsa_sim_cmd->add_option("--automaton", automaton, "Automaton JSON file");
  regex_opt->excludes(automaton_opt);
  fsa_sim_cmd->add_flag("--dfa", dfa, "Determinize a regex first");
  fsa_sim_cmd->add_option("input", input, "Input string")->required();

  auto* classify_cmd = app.add_subcommand("classify", "Text classification");
  classify_cmd->require_subcommand(1);
  auto* classify_train_cmd = classify_cmd->add_subcommand("train", "Train a classifier");
  classify_train_cmd->add_option("--corpus", ct.corpus, "label<TAB>text lines")->required();
  classify_train_cmd->add_option("--out", ct.out, "Model file to write")->required();
  classify_train_cmd->add_option("--algorithm", ct.algorithm, "nb, gis or iis")
      ->check(CLI::IsMember({"nb", "gis", "iis"}));
  classify_train_cmd->add_option("--cutoff", ct.cutoff, "Minimum word count");
  classify_train_cmd->add_option("--budget", ct.budget, "Maximum number of features");
  classify_train_cmd->add_option("--gamma", ct.gamma, "Naive Bayes smoothing");
  classify_train_cmd->add_option("--max-iter", ct.max_iter, "Maxent iteration limit");
  classify_train_cmd->add_option("--tol", ct.tol, "Maxent convergence tolerance");
  auto* classify_predict_cmd = classify_cmd->add_subcommand("predict", "Classify texts");
  classify_predict_cmd->add_option("--model", model, "Model file")->required();
  classify_predict_cmd->add_option("text", texts, "Texts to classify")->required();

  auto* session_cmd = app.add_subcommand("session", "Chart-parsing sessions without HTTP");
  session_cmd->require_subcommand(1);
  auto* replay_cmd = session_cmd->add_subcommand("replay", "Run a request transcript and print the responses");
  replay_cmd->add_option("transcript", transcript, "JSON array of {method, path, body}")->required();
  replay_cmd->add_option("--presets", presets, "Preset charts");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the session API over HTTP");
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--host", host, "Address to bind");
  serve_cmd->add_option("--presets", presets, "Preset charts");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (!args.empty() && !args.front().starts_with("-") && !app.get_subcommand_no_throw(args.front()))
      err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
    else
      err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (chunk_eval_cmd->parsed()) return chunk_eval(cascade, gold, out);
    if (chunk_rates_cmd->parsed()) return chunk_rates(gold, threshold, out_path, out);
    if (chunk_apply_cmd->parsed()) return chunk_apply(cascade, input, out);
    if (tag_train_cmd->parsed()) return tag_train(corpus, regexp_rules, default_tag, out_path, out);
    if (tag_eval_cmd->parsed()) return tag_eval(model, gold, out);
    if (tag_apply_cmd->parsed()) return tag_apply(model, sentence, out);
    if (parse_cmd->parsed()) {
      try {
        parse_strategy_name(strategy);
      } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n\n" << parse_cmd->help();
        return 2;
      }
      return chart_parse(grammar, strategy, sentence, out, err);
    }
    if (pcfg_parse_cmd->parsed()) return pcfg_parse(grammar, sentence, out, err);
    if (sr_parse_cmd->parsed()) return sr_command(grammar, trace, sentence, out, err);
    if (fsa_compile_cmd->parsed()) return fsa_compile(regex, dfa, out_path, out);
    if (fsa_sim_cmd->parsed()) {
      if (regex_opt->count() == 0 && automaton_opt->count() == 0) {
        err << "error: one of --regex or --automaton is required\n\n" << fsa_sim_cmd->help();
        return 2;
      }
      return fsa_simulate(regex, automaton, dfa, input, out);
    }
    if (classify_train_cmd->parsed()) return classify_train(ct, out);
    if (classify_predict_cmd->parsed()) return classify_predict(model, texts, out);
    if (replay_cmd->parsed()) return session_replay(transcript, presets, out);
    if (serve_cmd->parsed()) return serve(host, port, presets, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace nlkit
