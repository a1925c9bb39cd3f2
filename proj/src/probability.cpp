#include "nlkit/probability.hpp"

#include <cmath>

namespace nlkit {

void FreqDist::increment(const std::string& outcome, Count by) {
  if (by == 0) return;
  counts_[outcome] += by;
  total_ += by;
}

FreqDist::Count FreqDist::count(const std::string& outcome) const {
  auto it = counts_.find(outcome);
  return it == counts_.end() ? 0 : it->second;
}

double FreqDist::freq(const std::string& outcome) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(count(outcome)) / static_cast<double>(total_);
}

const std::string& FreqDist::max() const {
  if (counts_.empty()) throw EmptyDistribution();
  // std::map iterates in lexicographic order; strict > keeps the first.
  auto best = counts_.begin();
  for (auto it = counts_.begin(); it != counts_.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

const FreqDist* CondFreqDist::find(const std::string& condition) const {
  auto it = table_.find(condition);
  return it == table_.end() ? nullptr : &it->second;
}

ProbDist ProbDist::mle(FreqDist base) {
  const auto bins = base.size();
  return ProbDist(Kind::Mle, std::move(base), 0.0, bins);
}

ProbDist ProbDist::lidstone(FreqDist base, double gamma, std::size_t bins) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidBins("Lidstone gamma must be positive");
  if (bins == 0) throw InvalidBins("bin count is zero");
  if (bins < base.size())
    throw InvalidBins(std::to_string(bins) + " bins for " + std::to_string(base.size()) +
                      " observed outcomes");
  return ProbDist(Kind::Lidstone, std::move(base), gamma, bins);
}

double ProbDist::prob(const std::string& outcome) const {
  const auto c = static_cast<double>(base_.count(outcome));
  const auto n = static_cast<double>(base_.total());
  if (kind_ == Kind::Mle) {
    if (base_.empty()) throw EmptyDistribution();
    return c / n;
  }
  return (c + gamma_) / (n + gamma_ * static_cast<double>(bins_));
}

double ProbDist::unseen_prob() const {
  if (kind_ == Kind::Mle) {
    if (base_.empty()) throw EmptyDistribution();
    return 0.0;
  }
  return gamma_ / (static_cast<double>(base_.total()) + gamma_ * static_cast<double>(bins_));
}

double ProbDist::total_mass() const {
  double sum = 0.0;
  for (const auto& [outcome, count] : base_.counts()) sum += prob(outcome);
  sum += static_cast<double>(bins_ - base_.size()) * unseen_prob();
  return sum;
}

}  // namespace nlkit
