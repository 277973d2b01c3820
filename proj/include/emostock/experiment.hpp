#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emostock/dataset.hpp"
#include "emostock/inference.hpp"
#include "emostock/ingest.hpp"
#include "emostock/lstm.hpp"
#include "emostock/preprocess.hpp"
#include "emostock/stats.hpp"

namespace emostock {

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentPaths {
  std::filesystem::path tweets;
  std::filesystem::path prices;
  std::filesystem::path intensity_lexicon;
  std::filesystem::path binary_lexicon;
  std::filesystem::path stopwords;
  std::filesystem::path cache;       // optional: response cache JSONL
  std::filesystem::path stub_rules;  // optional: stub backend rule file
  std::filesystem::path out_dir = ".";
};

struct ExperimentConfig {
  std::vector<std::string> tickers = {"TSLA"};
  std::optional<Date> start_date;
  std::optional<Date> end_date;
  std::vector<std::string> modes = {"baseline"};  // baseline | m1 | m2 | m3
  bool llama_enhanced = false;                    // baseline ignores this
  ExperimentPaths paths;
  ModelConfig model;                              // input_dim is set per mode
  int repetitions = 10;
  std::uint64_t base_seed = 1;
  std::string llm_backend = "stub";               // stub | replay | http
  std::string classifier_backend = "stub";
  HttpOptions llm_http;
  HttpOptions classifier_http;
  std::string analyze = "text";                   // text | labels
  std::string sigma_scope = "full";               // full | train_only
  std::string non_trading = "roll_forward";       // roll_forward | drop
  std::string save_checkpoints = "none";          // none | first_run | all
  std::string significance_test = "welch";        // the only supported test
  bool retry_unparseable = false;
};

// Reads the JSON file, resolves relative paths against its directory, and
// applies EMOSTOCK_LLM_URL / EMOSTOCK_CLASSIFIER_URL / EMOSTOCK_API_KEY.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

int feature_width(const std::string& mode);
std::string display_mode(const std::string& mode);

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  double si_accuracy = 0.0;       // recall on significant-increase days
  double sd_accuracy = 0.0;
  double stable_accuracy = 0.0;
  double avg_si_sd = 0.0;
  std::size_t si_support = 0;
  std::size_t sd_support = 0;
  std::size_t stable_support = 0;
  bool si_undefined = false;      // zero-support class reported as 0
  bool sd_undefined = false;
  bool stable_undefined = false;
};

Metrics compute_metrics(const std::vector<MovementLabel>& predicted,
                        const std::vector<MovementLabel>& actual);
Metrics mean_metrics(const std::vector<Metrics>& runs);

// Welch's two-sample t-test on per-run scores (TooFewRuns below 2 each).
stats::WelchResult compare_significance(const std::vector<double>& runs_a,
                                        const std::vector<double>& runs_b);

// ---------------------------------------------------------------------------
// Backends and pipeline stages

struct BackendBundle {
  std::shared_ptr<ResponseCache> cache;
  std::unique_ptr<LlmBackend> llm;
  std::unique_ptr<ClassifierBackend> classifier;
};

BackendBundle make_backends(const ExperimentConfig& config);

struct CorpusBundle {
  std::vector<Tweet> tweets;       // ticker- and date-filtered
  std::vector<DailyPrice> prices;
};

CorpusBundle load_corpus(const ExperimentConfig& config, const std::string& ticker);

struct ScoredCorpus {
  std::vector<AnnotatedTweet> kept;  // every tweet when filtering is off
  std::vector<ScoredTweet> scored;   // parallel to kept
  FilterStats filter_stats;          // populated when LLM filtering ran
};

// Emotion scoring for a non-baseline mode, with optional LLM filtering first.
ScoredCorpus score_corpus(const ExperimentConfig& config, const CorpusBundle& corpus,
                          const std::string& mode, BackendBundle& backends);

struct DatasetBuild {
  FeatureTable table;              // raw (unscaled) rows
  ClassDistribution distribution;
  FilterStats filter_stats;        // populated when LLM filtering ran
  double sigma_value = 0.0;
  bool degenerate_sigma = false;
};

DatasetBuild build_dataset(const ExperimentConfig& config, const CorpusBundle& corpus,
                           const std::string& mode, BackendBundle& backends);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentReport {
  std::string ticker;
  std::string mode;
  bool enhanced = false;
  std::vector<Metrics> runs;       // one per repetition, seeds base_seed + i
  Metrics mean;
  FilterStats filter_stats;
  ClassDistribution distribution;
  double sigma_value = 0.0;

  std::vector<double> run_avgs() const;  // avg_si_sd per run
};

ExperimentReport run_experiment(const ExperimentConfig& config, const std::string& ticker,
                                const std::string& mode);

struct SignificanceRow {
  std::string ticker;  // a ticker name, or "pooled" across tickers
  std::string mode;
  bool enhanced = false;
  stats::WelchResult welch;
};

struct SuiteReport {
  ExperimentConfig config;                    // echo of the resolved run config
  std::vector<ExperimentReport> experiments;  // tickers x modes, config order
  std::vector<SignificanceRow> significance;  // each mode vs baseline
};

// Runs every (ticker, mode) pair; when "baseline" is among the modes, each
// other mode is tested against it per ticker and pooled across tickers.
SuiteReport run_suite(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Reports

// "0.385" -> "38.5%" (one decimal, half away from zero)
std::string render_percent(double fraction);

std::string render_markdown(const SuiteReport& suite);
std::string render_csv(const SuiteReport& suite);
std::string render_distribution_csv(const SuiteReport& suite);
std::string render_filter_stats_csv(const SuiteReport& suite);

// Writes report.(md|csv) plus class_distribution.csv and filter_stats.csv.
void write_reports(const SuiteReport& suite, const std::filesystem::path& out_dir,
                   const std::string& format);

}  // namespace emostock
