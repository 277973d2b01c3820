#pragma once

#include <stdexcept>
#include <string>

namespace emostock {

// Error taxonomy shared by all modules. `kind` drives the CLI exit code:
// config -> 2, data -> 3, backend -> 4.
enum class ErrorKind { config, data, backend };

enum class ErrorCode {
  // config / usage
  bad_config,
  too_few_runs,
  // ingest
  missing_column,
  encoding,
  non_monotonic_dates,
  negative_price,
  bad_row,
  empty_input,
  // preprocess
  empty_tweet,
  // emotion
  bad_score,
  unknown_emotion,
  // dataset
  mixed_methods,
  too_short,
  calendar_mismatch,
  too_few_rows,
  // lstm
  shape_mismatch,
  non_finite_input,
  stale_cache,
  non_finite_loss,
  // experiment
  length_mismatch,
  empty,
  // inference
  network,
  cache_miss,
  bad_response,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, ErrorKind kind, const std::string& message)
      : std::runtime_error(message), code_(code), kind_(kind) {}

  ErrorCode code() const { return code_; }
  ErrorKind kind() const { return kind_; }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::config: return 2;
      case ErrorKind::data: return 3;
      case ErrorKind::backend: return 4;
    }
    return 1;
  }

 private:
  ErrorCode code_;
  ErrorKind kind_;
};

inline Error config_error(ErrorCode code, const std::string& msg) {
  return Error(code, ErrorKind::config, msg);
}
inline Error data_error(ErrorCode code, const std::string& msg) {
  return Error(code, ErrorKind::data, msg);
}
inline Error backend_error(ErrorCode code, const std::string& msg) {
  return Error(code, ErrorKind::backend, msg);
}

}  // namespace emostock
