#include "emostock/inference.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "emostock/errors.hpp"
#include "emostock/rng.hpp"

namespace emostock {
namespace {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

// scheme://host[:port] and path; only plain http is supported.
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http")
    throw config_error(ErrorCode::bad_config, "endpoint url must start with http://: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

struct HttpResult {
  int status = 0;        // 0 means transport failure
  std::string body;
};

// One POST with retries on transport errors and 5xx; other statuses are
// returned to the caller for a BadResponse diagnosis.
HttpResult post_with_retries(const HttpOptions& options, const std::string& path,
                             const std::string& body) {
  auto [base, unused] = split_url(options.url);
  (void)unused;
  int delay_ms = options.backoff_ms;
  HttpResult last;
  int attempts = std::max(1, options.attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 2;
    }
    httplib::Client client(base);
    client.set_connection_timeout(options.timeout_s, 0);
    client.set_read_timeout(options.timeout_s, 0);
    httplib::Headers headers;
    if (!options.api_key.empty())
      headers.emplace("Authorization", "Bearer " + options.api_key);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last = HttpResult{};
      continue;
    }
    last = HttpResult{res->status, res->body};
    if (res->status >= 200 && res->status < 300) return last;
    if (res->status < 500) return last;  // client error: retrying will not help
  }
  if (last.status == 0)
    throw backend_error(ErrorCode::network,
                        "endpoint unreachable after " + std::to_string(attempts) +
                            " attempts: " + options.url);
  return last;
}

std::string require_2xx(const HttpResult& res, const std::string& url) {
  if (res.status < 200 || res.status >= 300)
    throw backend_error(ErrorCode::bad_response,
                        "endpoint " + url + " returned status " + std::to_string(res.status));
  return res.body;
}

}  // namespace

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(const std::filesystem::path& file) : file_(file) {
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;  // tolerate a torn tail line
    CacheEntry entry;
    entry.key = j.value("key", "");
    entry.response_text = j.value("response_text", "");
    entry.backend_id = j.value("backend_id", "");
    entry.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    if (!entry.key.empty()) entries_[entry.key] = entry;
  }
}

std::optional<CacheEntry> ResponseCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const CacheEntry& entry) {
  std::lock_guard lock(mutex_);
  entries_[entry.key] = entry;
  if (file_.empty()) return;
  json j{{"key", entry.key},
         {"response_text", entry.response_text},
         {"backend_id", entry.backend_id},
         {"timestamp_ms", entry.timestamp_ms}};
  std::ofstream out(file_, std::ios::app);
  out << j.dump() << '\n';
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string chat_cache_key(const ChatRequest& request) {
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.17g", request.temperature);
  std::string canonical = "chat\x1f";
  canonical += request.model_id;
  canonical += '\x1f';
  canonical += temp;
  canonical += '\x1f';
  canonical += std::to_string(request.max_output_tokens);
  canonical += '\x1f';
  canonical += request.prompt;
  return hex64(fnv1a64(canonical));
}

std::string classifier_cache_key(std::string_view text) {
  std::string canonical = "classify\x1f";
  canonical += text;
  return hex64(fnv1a64(canonical));
}

// ---------------------------------------------------------------------------
// complete()

std::string complete(const ChatRequest& request, LlmBackend& backend) {
  if (request.prompt.empty())
    throw config_error(ErrorCode::bad_config, "chat request has an empty prompt");
  if (request.temperature < 0.0 || !std::isfinite(request.temperature))
    throw config_error(ErrorCode::bad_config, "chat temperature must be finite and >= 0");
  if (request.max_output_tokens <= 0)
    throw config_error(ErrorCode::bad_config, "max_output_tokens must be positive");
  return backend.complete_raw(request);
}

// ---------------------------------------------------------------------------
// StubLlm

namespace {

// keyword -> canned emotion list for prompts no configured rule matches
const std::vector<std::pair<std::string_view, std::string_view>> kKeywordTable = {
    {"surge", "excitement, optimism"},
    {"rally", "excitement, confidence"},
    {"moon", "euphoria, greed"},
    {"soar", "joy, anticipation"},
    {"bullish", "optimism, confidence"},
    {"beat", "joy, confidence"},
    {"plunge", "fear, panic"},
    {"crash", "fear, dread"},
    {"dump", "anger, disappointment"},
    {"tank", "fear, disappointment"},
    {"bearish", "pessimism, worry"},
    {"uneasy", "anxiety, caution"},
    {"worried", "anxiety, fear"},
    {"steady", "calm, confidence"},
    {"calm", "calm, reassurance"},
    {"flat", "indifference, calm"},
};

std::string keyword_response(const std::string& prompt) {
  std::string out;
  std::vector<std::string_view> seen;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    for (const auto& [word, response] : kKeywordTable) {
      if (token != word) continue;
      if (std::find(seen.begin(), seen.end(), response) == seen.end()) {
        seen.push_back(response);
        if (!out.empty()) out += ", ";
        out += response;
      }
      break;
    }
    token.clear();
  };
  for (char c : prompt) {
    if (std::isalpha(static_cast<unsigned char>(c)))
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else
      flush();
  }
  flush();
  return out.empty() ? "no emotion" : out;
}

}  // namespace

StubLlm::StubLlm(std::vector<StubRule> rules, bool keyword_fallback)
    : rules_(std::move(rules)), keyword_fallback_(keyword_fallback) {}

StubLlm StubLlm::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error(ErrorCode::bad_config, "cannot read stub rules: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw config_error(ErrorCode::bad_config, "stub rules file is not a JSON object: " + path.string());
  std::vector<StubRule> rules;
  for (const auto& item : j.value("rules", json::array())) {
    if (!item.is_object() || !item.contains("contains") || !item.contains("response"))
      throw config_error(ErrorCode::bad_config, "stub rule needs contains and response fields");
    rules.push_back({item["contains"].get<std::string>(), item["response"].get<std::string>()});
  }
  return StubLlm(std::move(rules), j.value("keyword_fallback", true));
}

std::string StubLlm::complete_raw(const ChatRequest& request) {
  for (const auto& rule : rules_)
    if (request.prompt.find(rule.contains) != std::string::npos) return rule.response;
  if (keyword_fallback_) return keyword_response(request.prompt);
  return "no emotion";
}

// ---------------------------------------------------------------------------
// ReplayLlm

std::string ReplayLlm::complete_raw(const ChatRequest& request) {
  auto hit = cache_->lookup(chat_cache_key(request));
  if (!hit)
    throw backend_error(ErrorCode::cache_miss,
                        "replay backend has no cached response for key " + chat_cache_key(request));
  return hit->response_text;
}

// ---------------------------------------------------------------------------
// HttpLlm

HttpLlm::HttpLlm(HttpOptions options, std::shared_ptr<ResponseCache> cache)
    : options_(std::move(options)), cache_(std::move(cache)) {
  if (options_.max_in_flight < 1)
    throw config_error(ErrorCode::bad_config, "max_in_flight must be >= 1");
  split_url(options_.url);  // validate eagerly
}

std::string HttpLlm::id() const { return "http:" + options_.url; }

std::string HttpLlm::complete_raw(const ChatRequest& request) {
  const std::string key = chat_cache_key(request);
  if (cache_) {
    if (auto hit = cache_->lookup(key)) return hit->response_text;
  }
  {
    std::unique_lock lock(gate_mutex_);
    gate_cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;
  }
  std::string content;
  try {
    json body{{"model", request.model_id},
              {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
              {"temperature", request.temperature},
              {"max_tokens", request.max_output_tokens}};
    auto [base, path] = split_url(options_.url);
    (void)base;
    auto res = post_with_retries(options_, path, body.dump());
    std::string text = require_2xx(res, options_.url);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() ||
        j["choices"].empty() || !j["choices"][0].contains("message") ||
        !j["choices"][0]["message"].contains("content") ||
        !j["choices"][0]["message"]["content"].is_string())
      throw backend_error(ErrorCode::bad_response,
                          "chat endpoint returned a body without choices[0].message.content");
    content = j["choices"][0]["message"]["content"].get<std::string>();
  } catch (...) {
    std::lock_guard lock(gate_mutex_);
    --in_flight_;
    gate_cv_.notify_one();
    throw;
  }
  {
    std::lock_guard lock(gate_mutex_);
    --in_flight_;
    gate_cv_.notify_one();
  }
  if (cache_) cache_->put({key, content, id(), now_ms()});
  return content;
}

// ---------------------------------------------------------------------------
// classify_emotions()

ClassifierResponse classify_emotions(const std::string& text, ClassifierBackend& backend) {
  if (text.empty()) throw data_error(ErrorCode::empty_input, "classifier input text is empty");
  ClassifierResponse response = backend.classify_raw(text);
  double sum = 0.0;
  for (double s : response.scores) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0)
      throw backend_error(ErrorCode::bad_response,
                          "classifier score outside [0, 1]: " + std::to_string(s));
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw backend_error(ErrorCode::bad_response,
                        "classifier scores sum to " + std::to_string(sum) + ", expected 1");
  return response;
}

ClassifierResponse parse_classifier_body(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("scores") || !j["scores"].is_array())
    throw backend_error(ErrorCode::bad_response, "classifier body is not {\"scores\": [...]}");
  const auto& arr = j["scores"];
  ClassifierResponse response;
  if (arr.size() != response.scores.size())
    throw backend_error(ErrorCode::bad_response,
                        "classifier returned " + std::to_string(arr.size()) +
                            " scores, expected " + std::to_string(response.scores.size()));
  for (std::size_t i = 0; i < response.scores.size(); ++i) {
    if (!arr[i].is_number())
      throw backend_error(ErrorCode::bad_response, "classifier score is not a number");
    response.scores[i] = arr[i].get<double>();
  }
  return response;
}

ClassifierResponse StubClassifier::classify_raw(const std::string& text) {
  SplitMix64 rng(fnv1a64(text));
  ClassifierResponse response;
  double sum = 0.0;
  for (double& s : response.scores) {
    s = 0.05 + rng.next_double();
    sum += s;
  }
  for (double& s : response.scores) s /= sum;
  return response;
}

ClassifierResponse ReplayClassifier::classify_raw(const std::string& text) {
  auto hit = cache_->lookup(classifier_cache_key(text));
  if (!hit)
    throw backend_error(ErrorCode::cache_miss,
                        "replay classifier has no cached response for key " +
                            classifier_cache_key(text));
  return parse_classifier_body(hit->response_text);
}

HttpClassifier::HttpClassifier(HttpOptions options, std::shared_ptr<ResponseCache> cache)
    : options_(std::move(options)), cache_(std::move(cache)) {
  split_url(options_.url);
}

std::string HttpClassifier::id() const { return "http:" + options_.url; }

ClassifierResponse HttpClassifier::classify_raw(const std::string& text) {
  const std::string key = classifier_cache_key(text);
  if (cache_) {
    if (auto hit = cache_->lookup(key)) return parse_classifier_body(hit->response_text);
  }
  auto [base, path] = split_url(options_.url);
  (void)base;
  json body{{"text", text}};
  auto res = post_with_retries(options_, path, body.dump());
  std::string response_text = require_2xx(res, options_.url);
  ClassifierResponse response = parse_classifier_body(response_text);
  if (cache_) cache_->put({key, response_text, id(), now_ms()});
  return response;
}

}  // namespace emostock
