#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nlkit/errors.hpp"

namespace nlkit {

// Outcome counts for an experiment. Outcomes with count zero are never
// stored, so `size()` is the number of distinct observed outcomes.
class FreqDist {
 public:
  using Count = std::uint64_t;

  void increment(const std::string& outcome, Count by = 1);

  Count count(const std::string& outcome) const;
  Count total() const { return total_; }
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return total_ == 0; }

  // count/N, 0 when the distribution is empty.
  double freq(const std::string& outcome) const;

  // Most frequent outcome; ties go to the lexicographically smallest.
  const std::string& max() const;

  const std::map<std::string, Count>& counts() const { return counts_; }

  friend bool operator==(const FreqDist&, const FreqDist&) = default;

 private:
  std::map<std::string, Count> counts_;
  Count total_ = 0;
};

class CondFreqDist {
 public:
  void increment(const std::string& condition, const std::string& outcome,
                 FreqDist::Count by = 1) {
    table_[condition].increment(outcome, by);
  }
  // Returns nullptr for an unseen condition.
  const FreqDist* find(const std::string& condition) const;
  const std::map<std::string, FreqDist>& conditions() const { return table_; }

  friend bool operator==(const CondFreqDist&, const CondFreqDist&) = default;

 private:
  std::map<std::string, FreqDist> table_;
};

// Probability estimate over a fixed number of bins built from a FreqDist.
//   MLE:        P(x) = c(x) / N
//   Lidstone γ: P(x) = (c(x) + γ) / (N + γB)
// Laplace is γ = 1 and ELE is γ = 0.5.
class ProbDist {
 public:
  enum class Kind { Mle, Lidstone };

  static ProbDist mle(FreqDist base);
  static ProbDist lidstone(FreqDist base, double gamma, std::size_t bins);
  static ProbDist laplace(FreqDist base, std::size_t bins) { return lidstone(std::move(base), 1.0, bins); }
  static ProbDist ele(FreqDist base, std::size_t bins) { return lidstone(std::move(base), 0.5, bins); }

  double prob(const std::string& outcome) const;
  // Probability mass given to each bin with no observations.
  double unseen_prob() const;
  // Sum over all B bins: observed outcomes plus the unseen remainder.
  double total_mass() const;

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  std::size_t bins() const { return bins_; }
  const FreqDist& base() const { return base_; }

 private:
  ProbDist(Kind kind, FreqDist base, double gamma, std::size_t bins)
      : kind_(kind), base_(std::move(base)), gamma_(gamma), bins_(bins) {}

  Kind kind_;
  FreqDist base_;
  double gamma_ = 0.0;
  std::size_t bins_ = 0;
};

}  // namespace nlkit
