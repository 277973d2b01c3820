#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace emostock {

// ---------------------------------------------------------------------------
// Requests and responses

struct ChatRequest {
  std::string prompt;
  double temperature = 0.0;
  int max_output_tokens = 64;
  std::string model_id = "llama-3.1-8b-instruct";
};

// Probability scores over the seven transformer emotion dimensions, in the
// fixed order (anger, disgust, neutral, fear, joy, sadness, surprise).
struct ClassifierResponse {
  std::array<double, 7> scores{};
};

struct CacheEntry {
  std::string key;            // content hash of the request, nothing else
  std::string response_text;
  std::string backend_id;
  std::int64_t timestamp_ms = 0;
};

// ---------------------------------------------------------------------------
// Cache: append-only JSON-lines file, one CacheEntry per line. Writes are
// serialized; lookups read the in-memory index.

class ResponseCache {
 public:
  ResponseCache() = default;  // memory-only
  explicit ResponseCache(const std::filesystem::path& file);

  std::optional<CacheEntry> lookup(const std::string& key) const;
  void put(const CacheEntry& entry);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::filesystem::path file_;
  std::map<std::string, CacheEntry> entries_;
};

std::string chat_cache_key(const ChatRequest& request);
std::string classifier_cache_key(std::string_view text);

// ---------------------------------------------------------------------------
// Chat-completion backends

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete_raw(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
};

// Validates the request, then delegates to the backend.
std::string complete(const ChatRequest& request, LlmBackend& backend);

struct StubRule {
  std::string contains;   // substring matched against the prompt
  std::string response;
};

// Pure deterministic function of the prompt: configured rules first, then a
// small keyword scan over the tweet text, else "no emotion".
class StubLlm : public LlmBackend {
 public:
  explicit StubLlm(std::vector<StubRule> rules = {},
                   bool keyword_fallback = true);
  static StubLlm from_json_file(const std::filesystem::path& path);

  std::string complete_raw(const ChatRequest& request) override;
  std::string id() const override { return "stub"; }

 private:
  std::vector<StubRule> rules_;
  bool keyword_fallback_;
};

// Serves cached responses only; never touches the network.
class ReplayLlm : public LlmBackend {
 public:
  explicit ReplayLlm(std::shared_ptr<ResponseCache> cache)
      : cache_(std::move(cache)) {}
  std::string complete_raw(const ChatRequest& request) override;
  std::string id() const override { return "replay"; }

 private:
  std::shared_ptr<ResponseCache> cache_;
};

struct HttpOptions {
  std::string url;            // http://host:port/path
  std::string api_key;        // sent as Authorization: Bearer if non-empty
  int attempts = 3;
  int backoff_ms = 100;       // doubled after each failed attempt
  int max_in_flight = 4;
  int timeout_s = 60;
};

// Chat-completion-compatible JSON endpoint. Successful responses are written
// to the cache so later runs can replay them offline.
class HttpLlm : public LlmBackend {
 public:
  HttpLlm(HttpOptions options, std::shared_ptr<ResponseCache> cache = nullptr);
  std::string complete_raw(const ChatRequest& request) override;
  std::string id() const override;

 private:
  HttpOptions options_;
  std::shared_ptr<ResponseCache> cache_;
  std::mutex gate_mutex_;
  std::condition_variable gate_cv_;
  int in_flight_ = 0;
};

// ---------------------------------------------------------------------------
// Emotion-classifier backends

class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual ClassifierResponse classify_raw(const std::string& text) = 0;
  virtual std::string id() const = 0;
};

// Validates text and the returned distribution regardless of backend.
ClassifierResponse classify_emotions(const std::string& text,
                                     ClassifierBackend& backend);

// Hash-derived deterministic distribution.
class StubClassifier : public ClassifierBackend {
 public:
  ClassifierResponse classify_raw(const std::string& text) override;
  std::string id() const override { return "stub"; }
};

class ReplayClassifier : public ClassifierBackend {
 public:
  explicit ReplayClassifier(std::shared_ptr<ResponseCache> cache)
      : cache_(std::move(cache)) {}
  ClassifierResponse classify_raw(const std::string& text) override;
  std::string id() const override { return "replay"; }

 private:
  std::shared_ptr<ResponseCache> cache_;
};

// POST {"text": ...} -> {"scores": [7 reals]}
class HttpClassifier : public ClassifierBackend {
 public:
  HttpClassifier(HttpOptions options,
                 std::shared_ptr<ResponseCache> cache = nullptr);
  ClassifierResponse classify_raw(const std::string& text) override;
  std::string id() const override;

 private:
  HttpOptions options_;
  std::shared_ptr<ResponseCache> cache_;
};

// Parses a {"scores":[...]} body; shared by the http and replay paths.
ClassifierResponse parse_classifier_body(const std::string& body);

}  // namespace emostock
