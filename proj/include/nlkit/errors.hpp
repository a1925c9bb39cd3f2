#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>

namespace nlkit {

// Base class for every data error raised by the toolkit. The CLI maps these
// to exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTaggedItem : public Error {
 public:
  explicit MalformedTaggedItem(std::size_t position)
      : Error("malformed tagged item at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class EmptyDistribution : public Error {
 public:
  EmptyDistribution() : Error("empty distribution") {}
};

class InvalidBins : public Error {
 public:
  explicit InvalidBins(const std::string& what) : Error("invalid bins: " + what) {}
};

// Errors carrying a 1-based line number of a grammar file.
class LineError : public Error {
 public:
  LineError(const std::string& kind, std::size_t line, const std::string& detail)
      : Error(kind + " at line " + std::to_string(line) + (detail.empty() ? "" : ": " + detail)),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class GrammarSyntax : public LineError {
 public:
  GrammarSyntax(std::size_t line, const std::string& detail)
      : LineError("grammar syntax error", line, detail) {}
};

class InvalidProduction : public LineError {
 public:
  InvalidProduction(std::size_t line, const std::string& detail)
      : LineError("invalid production", line, detail) {}
};

class InvalidProbability : public LineError {
 public:
  InvalidProbability(std::size_t line, const std::string& detail)
      : LineError("invalid probability", line, detail) {}
};

class NotNormalized : public Error {
 public:
  NotNormalized(const std::string& lhs, double sum)
      : Error("probabilities for " + lhs + " sum to " + std::to_string(sum)), lhs_(lhs) {}
  const std::string& lhs() const { return lhs_; }

 private:
  std::string lhs_;
};

class UncoveredTokens : public Error {
 public:
  explicit UncoveredTokens(std::set<std::string> words);
  const std::set<std::string>& words() const { return words_; }

 private:
  std::set<std::string> words_;
};

class CyclicGrammar : public Error {
 public:
  explicit CyclicGrammar(const std::string& symbol)
      : Error("unary production cycle through " + symbol), symbol_(symbol) {}
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

class UnknownEdgeId : public Error {
 public:
  explicit UnknownEdgeId(std::size_t id) : Error("unknown edge id " + std::to_string(id)), id_(id) {}
  std::size_t id() const { return id_; }

 private:
  std::size_t id_;
};

class UnknownProduction : public Error {
 public:
  explicit UnknownProduction(const std::string& node)
      : Error("no grammar production matches local tree at " + node), node_(node) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

class PatternSyntax : public Error {
 public:
  PatternSyntax(const std::string& pattern, const std::string& detail)
      : Error("bad tag pattern '" + pattern + "': " + detail) {}
};

class TokenMismatch : public Error {
 public:
  TokenMismatch() : Error("gold and test token sequences differ") {}
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("empty corpus") {}
};

class RegexSyntax : public Error {
 public:
  RegexSyntax(std::size_t position, const std::string& detail)
      : Error("regex syntax error at " + std::to_string(position) + ": " + detail),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class MissingClass : public Error {
 public:
  explicit MissingClass(const std::string& label)
      : Error("class '" + label + "' has no training examples"), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// Malformed external input (JSON documents, corpus files) that does not fit
// a more specific category.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlkit
