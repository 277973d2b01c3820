#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "emostock/inference.hpp"

namespace emostock {

enum class LexiconKind { intensity, binary };

// m1: transformer classifier (7 dims)
// m2: intensity lexicon (8 dims)
// m3: binary lexicon (10 dims, adds the two polarity columns)
enum class EmotionMethod { m1, m2, m3 };

const std::vector<std::string>& emotion_dimensions(EmotionMethod method);
EmotionMethod lexicon_method(LexiconKind kind);
std::string method_name(EmotionMethod method);

// ---------------------------------------------------------------------------
// Word lexicon: tab-separated lines of word<TAB>emotion<TAB>score.

class Lexicon {
 public:
  using Entries = std::vector<std::pair<int, double>>;  // (dimension, score)

  static Lexicon load(const std::filesystem::path& path, LexiconKind kind);
  static Lexicon parse(std::string_view text, LexiconKind kind,
                       const std::string& origin = "<memory>");

  LexiconKind kind() const { return kind_; }
  EmotionMethod method() const { return lexicon_method(kind_); }
  std::size_t word_count() const { return words_.size(); }
  std::size_t duplicate_count() const { return duplicate_count_; }

  // nullptr when the word is absent.
  const Entries* find(const std::string& word) const;

  // True when the word has at least one strictly positive score, i.e. it
  // counts toward the matched-token denominator.
  bool matches(const std::string& word) const;

 private:
  explicit Lexicon(LexiconKind kind) : kind_(kind) {}
  LexiconKind kind_;
  std::unordered_map<std::string, Entries> words_;
  std::size_t duplicate_count_ = 0;
};

// ---------------------------------------------------------------------------
// Per-tweet emotion vectors

struct EmotionVector {
  EmotionMethod method = EmotionMethod::m2;
  Eigen::VectorXd values;
};

// Mean of per-dimension sums over matched token occurrences; a token with no
// positive lexicon score contributes nothing and does not count toward the
// denominator. No matches yields the zero vector.
EmotionVector score_lexicon(const std::vector<std::string>& tokens,
                            const Lexicon& lexicon);

EmotionVector score_transformer(const std::string& text,
                                ClassifierBackend& backend);

}  // namespace emostock
