#include "emostock/emotion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "emostock/errors.hpp"

namespace emostock {
namespace {

const std::vector<std::string> kDimsM1 = {"anger", "disgust", "neutral", "fear",
                                          "joy",   "sadness", "surprise"};
const std::vector<std::string> kDimsM2 = {"anger", "anticipation", "disgust", "fear",
                                          "joy",   "sadness",      "surprise", "trust"};
const std::vector<std::string> kDimsM3 = {"anger",    "anticipation", "disgust",
                                          "fear",     "joy",          "sadness",
                                          "surprise", "trust",        "positive", "negative"};

std::string lower(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_score(std::string_view field, const std::string& origin, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw data_error(ErrorCode::bad_score,
                     origin + ":" + std::to_string(line_no) + ": unreadable score '" +
                         std::string(field) + "'");
  return value;
}

}  // namespace

const std::vector<std::string>& emotion_dimensions(EmotionMethod method) {
  switch (method) {
    case EmotionMethod::m1: return kDimsM1;
    case EmotionMethod::m2: return kDimsM2;
    case EmotionMethod::m3: return kDimsM3;
  }
  throw config_error(ErrorCode::bad_config, "unknown emotion method");
}

EmotionMethod lexicon_method(LexiconKind kind) {
  return kind == LexiconKind::intensity ? EmotionMethod::m2 : EmotionMethod::m3;
}

std::string method_name(EmotionMethod method) {
  switch (method) {
    case EmotionMethod::m1: return "m1";
    case EmotionMethod::m2: return "m2";
    case EmotionMethod::m3: return "m3";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Lexicon

Lexicon Lexicon::load(const std::filesystem::path& path, LexiconKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error(ErrorCode::bad_config, "cannot read lexicon: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), kind, path.string());
}

Lexicon Lexicon::parse(std::string_view text, LexiconKind kind, const std::string& origin) {
  Lexicon lex(kind);
  const auto& dims = emotion_dimensions(lexicon_method(kind));

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = (tab1 == std::string_view::npos) ? std::string_view::npos
                                                        : line.find('\t', tab1 + 1);
    if (tab1 == std::string_view::npos || tab2 == std::string_view::npos)
      throw data_error(ErrorCode::bad_row,
                       origin + ":" + std::to_string(line_no) +
                           ": expected word<TAB>emotion<TAB>score");
    std::string word = lower(std::string(line.substr(0, tab1)));
    std::string emotion = lower(std::string(line.substr(tab1 + 1, tab2 - tab1 - 1)));
    double score = parse_score(line.substr(tab2 + 1), origin, line_no);

    auto dim_it = std::find(dims.begin(), dims.end(), emotion);
    if (dim_it == dims.end())
      throw data_error(ErrorCode::unknown_emotion,
                       origin + ":" + std::to_string(line_no) + ": unknown emotion '" +
                           emotion + "'");
    int dim = static_cast<int>(dim_it - dims.begin());

    if (kind == LexiconKind::intensity) {
      if (score < 0.0 || score > 1.0)
        throw data_error(ErrorCode::bad_score,
                         origin + ":" + std::to_string(line_no) +
                             ": intensity score outside [0, 1]");
    } else if (score != 0.0 && score != 1.0) {
      throw data_error(ErrorCode::bad_score,
                       origin + ":" + std::to_string(line_no) + ": association must be 0 or 1");
    }

    auto& entries = lex.words_[word];
    auto existing = std::find_if(entries.begin(), entries.end(),
                                 [dim](const auto& e) { return e.first == dim; });
    if (existing != entries.end()) {
      existing->second = score;  // last occurrence wins
      ++lex.duplicate_count_;
    } else {
      entries.emplace_back(dim, score);
    }
  }
  return lex;
}

const Lexicon::Entries* Lexicon::find(const std::string& word) const {
  auto it = words_.find(word);
  return it == words_.end() ? nullptr : &it->second;
}

bool Lexicon::matches(const std::string& word) const {
  const Entries* entries = find(word);
  if (!entries) return false;
  return std::any_of(entries->begin(), entries->end(),
                     [](const auto& e) { return e.second > 0.0; });
}

// ---------------------------------------------------------------------------
// Scoring

EmotionVector score_lexicon(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  EmotionVector out;
  out.method = lexicon.method();
  const auto dim_count = static_cast<Eigen::Index>(emotion_dimensions(out.method).size());
  out.values = Eigen::VectorXd::Zero(dim_count);

  std::size_t matched = 0;
  for (const auto& token : tokens) {
    const Lexicon::Entries* entries = lexicon.find(token);
    if (!entries) continue;
    bool positive = false;
    for (const auto& [dim, score] : *entries) {
      out.values[dim] += score;
      if (score > 0.0) positive = true;
    }
    if (positive) ++matched;
  }
  if (matched == 0) {
    out.values.setZero();
    return out;
  }
  out.values /= static_cast<double>(matched);
  return out;
}

EmotionVector score_transformer(const std::string& text, ClassifierBackend& backend) {
  ClassifierResponse response = classify_emotions(text, backend);
  EmotionVector out;
  out.method = EmotionMethod::m1;
  out.values = Eigen::VectorXd(static_cast<Eigen::Index>(response.scores.size()));
  for (std::size_t i = 0; i < response.scores.size(); ++i)
    out.values[static_cast<Eigen::Index>(i)] = response.scores[i];
  return out;
}

}  // namespace emostock
