#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "emostock/ingest.hpp"
#include "emostock/inference.hpp"

namespace emostock {

// Instruction block prepended to every tweet sent to the annotation model.
// Treat as frozen: the cache keys responses by the full prompt text.
inline constexpr const char* kEmotionPromptTemplate =
    "You will be given a human-written tweet. Identify all possible emotions "
    "expressed in the tweet. Return the output as a comma-separated list of "
    "emotion-related words that are relevant to the stock market context. If "
    "no emotion is detected, return \"no emotion\".";

std::string build_prompt(const std::string& tweet_text);

// ---------------------------------------------------------------------------
// Annotation responses

using EmotionLabels = std::vector<std::string>;

struct LlmAnnotation {
  enum class Kind { labels, no_emotion, unparseable };
  Kind kind = Kind::unparseable;
  EmotionLabels labels;  // lowercased, deduplicated, order of first mention
};

LlmAnnotation parse_llm_response(const std::string& raw);

// ---------------------------------------------------------------------------
// Tokenization

class StopwordSet {
 public:
  StopwordSet() = default;
  static StopwordSet load(const std::filesystem::path& path);
  static StopwordSet from_words(const std::vector<std::string>& words);

  bool contains(const std::string& word) const { return words_.count(word) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Lowercased word tokens with surrounding punctuation stripped; stopwords and
// punctuation-only tokens removed. "$TSLA," becomes "tsla".
std::vector<std::string> clean_text(const std::string& text,
                                    const StopwordSet& stopwords);

// ---------------------------------------------------------------------------
// Corpus filtering

struct FilterCounts {
  std::size_t before = 0;
  std::size_t after = 0;
  std::size_t no_emotion = 0;
  std::size_t unparseable = 0;
};

struct FilterStats {
  std::map<std::string, FilterCounts> per_ticker;

  FilterCounts totals() const;
  std::string to_csv() const;  // ticker,before,after,no_emotion_count,unparseable_count
};

struct AnnotatedTweet {
  Tweet tweet;
  LlmAnnotation annotation;         // always Kind::labels for kept tweets
  std::vector<std::string> tokens;  // clean_text of the tweet body
};

struct FilterOptions {
  int max_in_flight = 4;
  bool retry_unparseable = false;  // one extra completion before dropping
};

struct FilterResult {
  std::vector<AnnotatedTweet> kept;  // input order; no-emotion and unparseable removed
  FilterStats stats;
};

FilterResult filter_and_annotate(const std::vector<Tweet>& tweets,
                                 LlmBackend& backend,
                                 const StopwordSet& stopwords,
                                 const FilterOptions& options = {});

}  // namespace emostock
