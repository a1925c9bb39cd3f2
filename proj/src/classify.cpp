#include "nlkit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

namespace nlkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Softmax of log scores with the argmax (first index on ties).
Posterior normalize(const std::vector<double>& scores) {
  Posterior out;
  const double top = *std::max_element(scores.begin(), scores.end());
  out.probs.resize(scores.size());
  double z = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    out.probs[c] = std::exp(scores[c] - top);
    z += out.probs[c];
  }
  for (auto& p : out.probs) p /= z;
  out.label = static_cast<std::size_t>(std::max_element(out.probs.begin(), out.probs.end()) - out.probs.begin());
  return out;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> features) : features_(std::move(features)) {
  for (std::size_t k = 0; k < features_.size(); ++k)
    if (!index_.emplace(features_[k], k).second) throw FormatError("duplicate feature '" + features_[k] + "'");
}

std::size_t Vocabulary::find(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? npos : it->second;
}

bool FeatureVector::has(std::size_t id) const { return std::binary_search(active.begin(), active.end(), id); }

FeatureVector encode(std::span<const std::string> tokens, const Vocabulary& vocabulary) {
  FeatureVector out{vocabulary.size(), {}};
  for (const auto& t : tokens)
    if (auto id = vocabulary.find(t); id != Vocabulary::npos) out.active.push_back(id);
  std::sort(out.active.begin(), out.active.end());
  out.active.erase(std::unique(out.active.begin(), out.active.end()), out.active.end());
  return out;
}

Dataset make_dataset(std::span<const LabeledText> corpus, Vocabulary vocabulary, std::vector<std::string> classes) {
  if (classes.empty())
    for (const auto& t : corpus) classes.push_back(t.label);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  Dataset d{std::move(classes), std::move(vocabulary), {}};
  for (const auto& t : corpus) {
    auto it = std::lower_bound(d.classes.begin(), d.classes.end(), t.label);
    if (it == d.classes.end() || *it != t.label) throw FormatError("undeclared class '" + t.label + "'");
    d.examples.push_back({encode(t.tokens, d.vocabulary), static_cast<std::size_t>(it - d.classes.begin())});
  }
  return d;
}

Vocabulary select_features(std::span<const LabeledText> corpus, std::size_t cutoff, std::size_t budget) {
  if (corpus.empty()) throw EmptyCorpus();
  FreqDist counts;
  for (const auto& t : corpus)
    for (const auto& w : t.tokens) counts.increment(w);
  std::vector<std::pair<std::string, FreqDist::Count>> ranked;
  for (const auto& [w, c] : counts.counts())
    if (c >= cutoff) ranked.emplace_back(w, c);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > budget) ranked.resize(budget);
  std::vector<std::string> words;
  for (auto& [w, c] : ranked) words.push_back(std::move(w));
  return Vocabulary(std::move(words));
}

std::vector<LabeledText> read_labeled_corpus(std::string_view text) {
  std::vector<LabeledText> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0)
      throw FormatError("corpus line " + std::to_string(line_no) + ": expected label<TAB>text");
    LabeledText t{std::string(line.substr(0, tab)), {}};
    std::string_view rest = line.substr(tab + 1);
    std::size_t i = 0;
    while (i < rest.size()) {
      while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < rest.size() && rest[j] != ' ' && rest[j] != '\t') ++j;
      if (j > i) t.tokens.emplace_back(rest.substr(i, j - i));
      i = j;
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Naive Bayes

NaiveBayesModel::NaiveBayesModel(std::vector<std::string> classes, Vocabulary vocabulary, ProbDist priors,
                                 std::vector<std::vector<double>> likelihoods, double gamma)
    : classes_(std::move(classes)),
      vocabulary_(std::move(vocabulary)),
      priors_(std::move(priors)),
      likelihoods_(std::move(likelihoods)),
      gamma_(gamma) {}

Posterior NaiveBayesModel::classify(const FeatureVector& x) const {
  std::vector<double> scores(classes_.size());
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    scores[c] = std::log(priors_.prob(classes_[c]));
    for (auto f : x.active) scores[c] += std::log(likelihoods_[c][f]);
  }
  return normalize(scores);
}

NaiveBayesModel train_naive_bayes(const Dataset& data, double gamma) {
  const auto nc = data.classes.size();
  const auto nf = data.vocabulary.size();
  FreqDist labels;
  std::vector<std::vector<FreqDist::Count>> present(nc, std::vector<FreqDist::Count>(nf, 0));
  for (const auto& ex : data.examples) {
    labels.increment(data.classes[ex.label]);
    for (auto f : ex.features.active) ++present[ex.label][f];
  }
  for (const auto& c : data.classes)
    if (labels.count(c) == 0) throw MissingClass(c);

  std::vector<std::vector<double>> likelihoods(nc, std::vector<double>(nf));
  for (std::size_t c = 0; c < nc; ++c) {
    const auto n_c = labels.count(data.classes[c]);
    for (std::size_t f = 0; f < nf; ++f) {
      FreqDist outcome;
      outcome.increment("present", present[c][f]);
      outcome.increment("absent", n_c - present[c][f]);
      likelihoods[c][f] = ProbDist::lidstone(std::move(outcome), gamma, 2).prob("present");
    }
  }
  return NaiveBayesModel(data.classes, data.vocabulary, ProbDist::mle(std::move(labels)), std::move(likelihoods),
                         gamma);
}

// ---------------------------------------------------------------------------
// Maximum entropy

std::string_view maxent_algorithm_name(MaxentAlgorithm a) { return a == MaxentAlgorithm::Gis ? "gis" : "iis"; }

MaxentAlgorithm parse_maxent_algorithm(std::string_view name) {
  if (name == "gis" || name == "GIS") return MaxentAlgorithm::Gis;
  if (name == "iis" || name == "IIS") return MaxentAlgorithm::Iis;
  throw FormatError("unknown maxent algorithm '" + std::string(name) + "'");
}

MaxentModel::MaxentModel(std::vector<std::string> classes, Vocabulary vocabulary, std::vector<double> weights,
                         double correction_weight, MaxentTrainingLog log)
    : classes_(std::move(classes)),
      vocabulary_(std::move(vocabulary)),
      weights_(std::move(weights)),
      correction_weight_(correction_weight),
      log_(std::move(log)) {
  if (weights_.size() != vocabulary_.size() * classes_.size()) throw FormatError("weight table has the wrong size");
}

Posterior MaxentModel::classify(const FeatureVector& x) const {
  const auto nc = classes_.size();
  std::vector<double> scores(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c)
    for (auto f : x.active) scores[c] += weights_[f * nc + c];
  if (std::all_of(scores.begin(), scores.end(), [](double s) { return s == kNegInf; })) {
    std::fill(scores.begin(), scores.end(), 0.0);
    for (std::size_t c = 0; c < nc; ++c)
      for (auto f : x.active)
        if (weights_[f * nc + c] != kNegInf) scores[c] += weights_[f * nc + c];
  }
  return normalize(scores);
}

std::vector<double> MaxentModel::model_expectations(const Dataset& data) const {
  const auto nc = classes_.size();
  std::vector<double> out(vocabulary_.size() * nc, 0.0);
  if (data.examples.empty()) return out;
  for (const auto& ex : data.examples) {
    const auto post = classify(ex.features);
    for (auto f : ex.features.active)
      for (std::size_t c = 0; c < nc; ++c) out[f * nc + c] += post.probs[c];
  }
  for (auto& v : out) v /= static_cast<double>(data.examples.size());
  return out;
}

std::vector<double> empirical_expectations(const Dataset& data) {
  const auto nc = data.classes.size();
  std::vector<double> out(data.vocabulary.size() * nc, 0.0);
  if (data.examples.empty()) return out;
  for (const auto& ex : data.examples)
    for (auto f : ex.features.active) out[f * nc + ex.label] += 1.0;
  for (auto& v : out) v /= static_cast<double>(data.examples.size());
  return out;
}

namespace {

double max_violation(const std::vector<double>& emp, const std::vector<double>& model,
                     const std::vector<bool>& retained) {
  double worst = 0.0;
  for (std::size_t j = 0; j < emp.size(); ++j)
    if (retained[j]) worst = std::max(worst, std::abs(emp[j] - model[j]));
  return worst;
}

// Root of Σ_m a_m exp(δ m) = target by bisection; a is indexed by m.
double solve_iis_update(const std::vector<double>& a, double target) {
  auto g = [&](double delta) {
    double sum = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m)
      if (a[m] != 0.0) sum += a[m] * std::exp(delta * static_cast<double>(m));
    return sum - target;
  };
  double lo = -1.0, hi = 1.0;
  for (int k = 0; k < 60 && g(lo) > 0.0; ++k) lo *= 2.0;
  for (int k = 0; k < 60 && g(hi) < 0.0; ++k) hi *= 2.0;
  for (int k = 0; k < 50 && hi - lo > 1e-10; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MaxentModel train_maxent(const Dataset& data, const MaxentOptions& options) {
  const auto nc = data.classes.size();
  const auto nf = data.vocabulary.size();
  const auto n = static_cast<double>(data.examples.size());
  const auto emp = empirical_expectations(data);

  MaxentTrainingLog log;
  std::vector<double> weights(nf * nc, 0.0);
  std::vector<bool> retained(nf * nc, true);
  for (std::size_t j = 0; j < emp.size(); ++j) {
    if (emp[j] == 0.0) {
      retained[j] = false;
      weights[j] = kNegInf;
      log.excluded.emplace_back(j / nc, j % nc);
    }
  }
  if (!log.excluded.empty())
    std::clog << "maxent: " << log.excluded.size() << " joint feature(s) with zero empirical count excluded\n";

  // GIS constant: the largest number of active joint features for any (x, c).
  std::size_t max_active = 0;
  for (const auto& ex : data.examples) max_active = std::max(max_active, ex.features.active.size());
  const double gis_c = static_cast<double>(std::max<std::size_t>(max_active, 1));

  auto current = [&] { return MaxentModel(data.classes, data.vocabulary, weights); };
  auto model = current().model_expectations(data);
  log.violations.push_back(max_violation(emp, model, retained));

  while (log.violations.back() >= options.tol && log.iterations < options.max_iter) {
    if (options.algorithm == MaxentAlgorithm::Gis) {
      for (std::size_t j = 0; j < weights.size(); ++j)
        if (retained[j] && model[j] > 0.0) weights[j] += std::log(emp[j] / model[j]) / gis_c;
      // The correction feature C - |x| takes the same value for every class
      // of an input, so its expectations always agree and its weight stays 0.
    } else {
      const auto m = current();
      std::vector<std::vector<double>> a(nf * nc, std::vector<double>(max_active + 1, 0.0));
      for (const auto& ex : data.examples) {
        const auto post = m.classify(ex.features);
        const auto size = ex.features.active.size();
        for (auto f : ex.features.active)
          for (std::size_t c = 0; c < nc; ++c) a[f * nc + c][size] += post.probs[c];
      }
      for (std::size_t j = 0; j < weights.size(); ++j)
        if (retained[j] && model[j] > 0.0) weights[j] += solve_iis_update(a[j], emp[j] * n);
    }
    ++log.iterations;
    model = current().model_expectations(data);
    log.violations.push_back(max_violation(emp, model, retained));
  }
  log.converged = log.violations.back() < options.tol;
  return MaxentModel(data.classes, data.vocabulary, std::move(weights), 0.0, std::move(log));
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json weight_json(double w) { return std::isinf(w) ? nlohmann::json(nullptr) : nlohmann::json(w); }

}  // namespace

nlohmann::json model_to_json(const NaiveBayesModel& m) {
  auto priors = nlohmann::json::array();
  auto likelihoods = nlohmann::json::array();
  for (std::size_t c = 0; c < m.classes().size(); ++c) {
    priors.push_back(m.priors().prob(m.classes()[c]));
    auto row = nlohmann::json::array();
    for (std::size_t f = 0; f < m.vocabulary().size(); ++f) row.push_back(m.likelihood(c, f));
    likelihoods.push_back(row);
  }
  return {{"type", "naive_bayes"}, {"classes", m.classes()}, {"vocabulary", m.vocabulary().features()},
          {"gamma", m.gamma()},    {"priors", priors},       {"label_counts", m.priors().base().counts()},
          {"likelihoods", likelihoods}};
}

nlohmann::json model_to_json(const MaxentModel& m) {
  auto weights = nlohmann::json::array();
  for (std::size_t f = 0; f < m.vocabulary().size(); ++f) {
    auto row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.classes().size(); ++c) row.push_back(weight_json(m.weight(f, c)));
    weights.push_back(row);
  }
  return {{"type", "maxent"},
          {"classes", m.classes()},
          {"vocabulary", m.vocabulary().features()},
          {"weights", weights},
          {"iterations", m.log().iterations},
          {"final_violation", m.log().final_violation()}};
}

ClassifierModel model_from_json(const nlohmann::json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    auto classes = j.at("classes").get<std::vector<std::string>>();
    Vocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());
    if (type == "naive_bayes") {
      const auto like = j.at("likelihoods").get<std::vector<std::vector<double>>>();
      if (like.size() != classes.size()) throw FormatError("naive bayes likelihoods do not match classes");
      for (const auto& row : like)
        if (row.size() != vocab.size()) throw FormatError("naive bayes likelihoods do not match vocabulary");
      FreqDist counts;
      for (const auto& [label, n] : j.at("label_counts").items()) counts.increment(label, n.get<FreqDist::Count>());
      for (const auto& c : classes)
        if (counts.count(c) == 0) throw MissingClass(c);
      return NaiveBayesModel(classes, std::move(vocab), ProbDist::mle(std::move(counts)), like,
                             j.at("gamma").get<double>());
    }
    if (type == "maxent") {
      std::vector<double> weights;
      for (const auto& row : j.at("weights")) {
        if (row.size() != classes.size()) throw FormatError("maxent weight row does not match classes");
        for (const auto& w : row) weights.push_back(w.is_null() ? kNegInf : w.get<double>());
      }
      if (weights.size() != vocab.size() * classes.size()) throw FormatError("maxent weights do not match vocabulary");
      MaxentTrainingLog log;
      log.iterations = j.value("iterations", std::size_t{0});
      if (j.contains("final_violation")) log.violations.push_back(j.at("final_violation").get<double>());
      return MaxentModel(classes, std::move(vocab), std::move(weights), 0.0, std::move(log));
    }
    throw FormatError("unknown model type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model: ") + e.what());
  }
}

Posterior classify(const ClassifierModel& m, const FeatureVector& x) {
  return std::visit([&](const auto& model) { return model.classify(x); }, m);
}

}  // namespace nlkit
