#pragma once

// Text classification over binary presence features.
//
// Naive Bayes:
//   P(c | x) ∝ P(c) · Π_{f present in x} P(f=1 | c)
//   P(c) is MLE over training labels; P(f=1 | c) = (n(f,c) + γ) / (n(c) + 2γ),
//   Lidstone over the two outcomes present/absent.
//
// Maximum entropy:
//   P(c | x) ∝ exp(Σ_f λ(f,c) · [f ∈ x])
// Joint features are (input feature, class) pairs. Training drives the
// model expectation E_model[f,c] = 1/N Σ_i P(c|x_i)[f ∈ x_i] to the empirical
// E_emp[f,c] = 1/N Σ_i [c_i = c][f ∈ x_i].
//   GIS adds a correction feature so every (x, c) has the same feature sum
//   C, then updates λ_j += (1/C) log(E_emp[j] / E_model[j]).
//   IIS solves Σ_m a_{j,m} exp(δ m) = N E_emp[j] for each feature, where
//   a_{j,m} sums P(c|x_i)[f ∈ x_i] over examples with m active features,
//   by bisection, and sets λ_j += δ.
// Joint features never seen in training (E_emp = 0) are excluded: their
// weight is fixed at -infinity, which is where the maxent solution puts
// them, and they take no part in updates or the convergence test.

#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nlkit/probability.hpp"

namespace nlkit {

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> features);  // throws FormatError on duplicates

  std::size_t size() const { return features_.size(); }
  const std::vector<std::string>& features() const { return features_; }
  const std::string& operator[](std::size_t id) const { return features_[id]; }
  // Feature id or npos.
  std::size_t find(const std::string& word) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::string> features_;
  std::map<std::string, std::size_t> index_;
};

struct FeatureVector {
  std::size_t dimension = 0;
  std::vector<std::size_t> active;  // sorted, unique, each < dimension

  bool has(std::size_t id) const;
};

// Binary presence of vocabulary words; unknown words are ignored.
FeatureVector encode(std::span<const std::string> tokens, const Vocabulary& vocabulary);

struct LabeledText {
  std::string label;
  std::vector<std::string> tokens;
};

struct LabeledExample {
  FeatureVector features;
  std::size_t label = 0;  // index into the class list
};

struct Dataset {
  std::vector<std::string> classes;  // sorted
  Vocabulary vocabulary;
  std::vector<LabeledExample> examples;
};

// Encodes a corpus. Classes default to the sorted set of labels seen;
// declared classes may include labels with no examples.
Dataset make_dataset(std::span<const LabeledText> corpus, Vocabulary vocabulary,
                     std::vector<std::string> classes = {});

// Words occurring at least `cutoff` times, most frequent first (ties in
// lexicographic order), at most `budget` of them. Throws EmptyCorpus.
Vocabulary select_features(std::span<const LabeledText> corpus, std::size_t cutoff, std::size_t budget);

// `label<TAB>token token ...` per line; throws FormatError.
std::vector<LabeledText> read_labeled_corpus(std::string_view text);

struct Posterior {
  std::size_t label = 0;      // argmax; ties go to the smaller index
  std::vector<double> probs;  // per class, sums to 1
};

class NaiveBayesModel {
 public:
  NaiveBayesModel(std::vector<std::string> classes, Vocabulary vocabulary, ProbDist priors,
                  std::vector<std::vector<double>> likelihoods, double gamma);

  const std::vector<std::string>& classes() const { return classes_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  const ProbDist& priors() const { return priors_; }
  // P(f=1 | c), indexed [class][feature].
  double likelihood(std::size_t cls, std::size_t feature) const { return likelihoods_[cls][feature]; }
  double gamma() const { return gamma_; }

  Posterior classify(const FeatureVector& x) const;

 private:
  std::vector<std::string> classes_;
  Vocabulary vocabulary_;
  ProbDist priors_;
  std::vector<std::vector<double>> likelihoods_;
  double gamma_;
};

// Throws MissingClass if a declared class has no examples.
NaiveBayesModel train_naive_bayes(const Dataset& data, double gamma = 1.0);

enum class MaxentAlgorithm { Gis, Iis };

std::string_view maxent_algorithm_name(MaxentAlgorithm a);
MaxentAlgorithm parse_maxent_algorithm(std::string_view name);

struct MaxentOptions {
  MaxentAlgorithm algorithm = MaxentAlgorithm::Gis;
  std::size_t max_iter = 100;
  double tol = 1e-4;
};

struct MaxentTrainingLog {
  std::size_t iterations = 0;
  // Max |E_emp - E_model| over retained features, before the first update
  // and after each one.
  std::vector<double> violations;
  std::vector<std::pair<std::size_t, std::size_t>> excluded;  // (feature, class)
  bool converged = false;

  double final_violation() const { return violations.empty() ? 0.0 : violations.back(); }
};

class MaxentModel {
 public:
  MaxentModel(std::vector<std::string> classes, Vocabulary vocabulary, std::vector<double> weights,
              double correction_weight = 0.0, MaxentTrainingLog log = {});

  const std::vector<std::string>& classes() const { return classes_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  // λ(f, c); -infinity for excluded features.
  double weight(std::size_t feature, std::size_t cls) const { return weights_[feature * classes_.size() + cls]; }
  const std::vector<double>& weights() const { return weights_; }
  double correction_weight() const { return correction_weight_; }
  const MaxentTrainingLog& log() const { return log_; }

  // When every class is ruled out by an excluded feature, the excluded
  // features are ignored for that input.
  Posterior classify(const FeatureVector& x) const;

  // E_model for every joint feature (f, c), indexed f * |classes| + c.
  std::vector<double> model_expectations(const Dataset& data) const;

 private:
  std::vector<std::string> classes_;
  Vocabulary vocabulary_;
  std::vector<double> weights_;
  double correction_weight_;
  MaxentTrainingLog log_;
};

// E_emp for every joint feature, indexed f * |classes| + c.
std::vector<double> empirical_expectations(const Dataset& data);

MaxentModel train_maxent(const Dataset& data, const MaxentOptions& options = {});

// Model dumps: {"type", "classes", "vocabulary", "weights"|"likelihoods", ...}.
nlohmann::json model_to_json(const NaiveBayesModel& m);
nlohmann::json model_to_json(const MaxentModel& m);

using ClassifierModel = std::variant<NaiveBayesModel, MaxentModel>;
ClassifierModel model_from_json(const nlohmann::json& j);  // throws FormatError
Posterior classify(const ClassifierModel& m, const FeatureVector& x);

}  // namespace nlkit
