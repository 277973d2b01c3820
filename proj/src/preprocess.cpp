#include "emostock/preprocess.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include "emostock/csv.hpp"
#include "emostock/errors.hpp"

namespace emostock {
namespace {

bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && ascii_space(s[b])) ++b;
  while (e > b && ascii_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string ascii_lower(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool unicode_space(char32_t cp) {
  if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == 0x0B || cp == 0x0C)
    return true;
  if (cp == 0xA0 || cp == 0x1680 || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
      cp == 0x205F || cp == 0x3000)
    return true;
  return cp >= 0x2000 && cp <= 0x200A;
}

bool edge_punct(char32_t cp) {
  if (cp < 0x80) {
    auto c = static_cast<unsigned char>(cp);
    return std::ispunct(c) != 0;
  }
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:  // curly quotes
    case 0x2013: case 0x2014:                            // en/em dash
    case 0x2026:                                         // ellipsis
    case 0x00A1: case 0x00BF:                            // inverted ! ?
      return true;
    default:
      return false;
  }
}

// Decodes one codepoint; advances i past it. Invalid bytes yield U+FFFD and
// advance by one so malformed input cannot loop forever.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = (b0 >= 0xF0) ? 4 : (b0 >= 0xE0) ? 3 : (b0 >= 0xC0) ? 2 : 0;
  if (len == 0 || i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  char32_t cp = b0 & (0xFF >> (len + 1));
  for (int k = 1; k < len; ++k) {
    unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

std::string build_prompt(const std::string& tweet_text) {
  if (trim(tweet_text).empty())
    throw data_error(ErrorCode::empty_tweet, "cannot build a prompt from an empty tweet");
  std::string prompt = kEmotionPromptTemplate;
  prompt += "\n\nTweet: ";
  prompt += tweet_text;
  return prompt;
}

namespace {

// strips ASCII punctuation and whitespace from both ends
std::string strip_edges(std::string_view s) {
  std::size_t b = 0, e = s.size();
  auto trimmable = [&](char c) {
    return ascii_space(c) || std::ispunct(static_cast<unsigned char>(c)) != 0;
  };
  while (b < e && trimmable(s[b])) ++b;
  while (e > b && trimmable(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// lowercase word(s): letters with interior spaces or hyphens
bool valid_label(const std::string& label) {
  if (label.empty() || label.front() < 'a' || label.front() > 'z') return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || c == ' ' || c == '-';
  });
}

}  // namespace

LlmAnnotation parse_llm_response(const std::string& raw) {
  if (ascii_lower(strip_edges(raw)) == "no emotion")
    return {LlmAnnotation::Kind::no_emotion, {}};

  LlmAnnotation out;
  out.kind = LlmAnnotation::Kind::unparseable;
  std::string body = trim(raw);
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    std::string item = ascii_lower(strip_edges(std::string_view(body).substr(
        start, (comma == std::string::npos ? body.size() : comma) - start)));
    start = (comma == std::string::npos) ? body.size() + 1 : comma + 1;
    if (!valid_label(item)) continue;
    if (std::find(out.labels.begin(), out.labels.end(), item) == out.labels.end())
      out.labels.push_back(item);
  }
  if (!out.labels.empty()) out.kind = LlmAnnotation::Kind::labels;
  return out;
}

// ---------------------------------------------------------------------------
// StopwordSet / clean_text

StopwordSet StopwordSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw config_error(ErrorCode::bad_config, "cannot read stopword list: " + path.string());
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    std::string word = trim(line);
    if (!word.empty()) set.words_.insert(ascii_lower(word));
  }
  return set;
}

StopwordSet StopwordSet::from_words(const std::vector<std::string>& words) {
  StopwordSet set;
  for (const auto& w : words) set.words_.insert(ascii_lower(w));
  return set;
}

std::vector<std::string> clean_text(const std::string& text, const StopwordSet& stopwords) {
  std::vector<std::string> tokens;
  std::vector<char32_t> current;
  auto flush = [&] {
    if (current.empty()) return;
    std::size_t b = 0, e = current.size();
    while (b < e && edge_punct(current[b])) ++b;
    while (e > b && edge_punct(current[e - 1])) --e;
    if (b < e) {
      std::string token;
      for (std::size_t k = b; k < e; ++k) append_utf8(token, current[k]);
      if (!stopwords.contains(token)) tokens.push_back(std::move(token));
    }
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = decode_utf8(text, i);
    if (unicode_space(cp)) {
      flush();
      continue;
    }
    if (cp == 0x2019) cp = U'\'';  // curly apostrophe: keep contractions matchable
    if (cp < 0x80)
      cp = static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
    current.push_back(cp);
  }
  flush();
  return tokens;
}

// ---------------------------------------------------------------------------
// FilterStats

FilterCounts FilterStats::totals() const {
  FilterCounts t;
  for (const auto& [ticker, c] : per_ticker) {
    t.before += c.before;
    t.after += c.after;
    t.no_emotion += c.no_emotion;
    t.unparseable += c.unparseable;
  }
  return t;
}

std::string FilterStats::to_csv() const {
  std::ostringstream out;
  out << "ticker,before,after,no_emotion_count,unparseable_count\n";
  for (const auto& [ticker, c] : per_ticker) {
    const std::string fields[] = {ticker, std::to_string(c.before),
                                  std::to_string(c.after), std::to_string(c.no_emotion),
                                  std::to_string(c.unparseable)};
    csv::write_row(out, fields);
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// filter_and_annotate

FilterResult filter_and_annotate(const std::vector<Tweet>& tweets, LlmBackend& backend,
                                 const StopwordSet& stopwords, const FilterOptions& options) {
  if (options.max_in_flight < 1)
    throw config_error(ErrorCode::bad_config, "max_in_flight must be >= 1");

  std::vector<std::string> responses(tweets.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tweets.size()) return;
      {
        std::lock_guard lock(error_mutex);
        if (first_error) return;
      }
      try {
        ChatRequest request;
        request.prompt = build_prompt(tweets[i].text);
        responses[i] = complete(request, backend);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(options.max_in_flight), tweets.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  FilterResult result;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    FilterCounts& counts = result.stats.per_ticker[tweets[i].ticker];
    ++counts.before;
    LlmAnnotation annotation = parse_llm_response(responses[i]);
    if (annotation.kind == LlmAnnotation::Kind::unparseable && options.retry_unparseable) {
      ChatRequest request;
      request.prompt = build_prompt(tweets[i].text);
      annotation = parse_llm_response(complete(request, backend));
    }
    switch (annotation.kind) {
      case LlmAnnotation::Kind::no_emotion:
        ++counts.no_emotion;
        continue;
      case LlmAnnotation::Kind::unparseable:
        ++counts.unparseable;
        continue;
      case LlmAnnotation::Kind::labels:
        break;
    }
    ++counts.after;
    result.kept.push_back({tweets[i], std::move(annotation), clean_text(tweets[i].text, stopwords)});
  }
  return result;
}

}  // namespace emostock
