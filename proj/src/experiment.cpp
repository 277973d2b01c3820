#include "emostock/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emostock/csv.hpp"
#include "emostock/emotion.hpp"
#include "emostock/errors.hpp"

namespace emostock {
namespace {

using nlohmann::json;

// Re-throws module errors with the pipeline stage prepended.
template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), e.kind(), std::string(name) + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error(ErrorCode::bad_config, "cannot read file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path with_ticker(const std::filesystem::path& path,
                                  const std::string& ticker) {
  std::string s = path.string();
  const std::string token = "{ticker}";
  for (std::size_t pos = s.find(token); pos != std::string::npos; pos = s.find(token))
    s.replace(pos, token.size(), ticker);
  return s;
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::set<std::string> kModes = {"baseline", "m1", "m2", "m3"};

EmotionMethod method_of(const std::string& mode) {
  if (mode == "m1") return EmotionMethod::m1;
  if (mode == "m2") return EmotionMethod::m2;
  if (mode == "m3") return EmotionMethod::m3;
  throw config_error(ErrorCode::bad_config, "mode has no emotion method: " + mode);
}

}  // namespace

int feature_width(const std::string& mode) {
  if (mode == "baseline") return 5;
  return 5 + static_cast<int>(emotion_dimensions(method_of(mode)).size()) + 1;
}

std::string display_mode(const std::string& mode) {
  if (mode == "baseline") return "Baseline";
  if (mode == "m1") return "Transformer";
  if (mode == "m2") return "Intensity Lexicon";
  if (mode == "m3") return "Association Lexicon";
  return mode;
}

// ---------------------------------------------------------------------------
// Config loading

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw config_error(ErrorCode::bad_config, "config is not a JSON object: " + path.string());

  ExperimentConfig c;
  if (j.contains("tickers")) {
    c.tickers.clear();
    for (const auto& t : j["tickers"]) c.tickers.push_back(t.get<std::string>());
  } else if (j.contains("ticker")) {
    c.tickers = {j["ticker"].get<std::string>()};
  }
  if (c.tickers.empty())
    throw config_error(ErrorCode::bad_config, "config names no tickers");

  auto parse_date_key = [&](const char* key) -> std::optional<Date> {
    if (!j.contains(key)) return std::nullopt;
    auto d = Date::parse(j[key].get<std::string>());
    if (!d)
      throw config_error(ErrorCode::bad_config,
                         std::string(key) + " is not a YYYY-MM-DD date");
    return d;
  };
  c.start_date = parse_date_key("start_date");
  c.end_date = parse_date_key("end_date");
  if (c.start_date && c.end_date && *c.end_date < *c.start_date)
    throw config_error(ErrorCode::bad_config, "end_date is before start_date");

  if (j.contains("modes")) {
    c.modes.clear();
    for (const auto& m : j["modes"]) c.modes.push_back(m.get<std::string>());
  } else if (j.contains("mode")) {
    c.modes = {j["mode"].get<std::string>()};
  }
  for (const auto& mode : c.modes)
    if (!kModes.count(mode))
      throw config_error(ErrorCode::bad_config, "unknown mode: " + mode);
  if (c.modes.empty()) throw config_error(ErrorCode::bad_config, "config names no modes");

  c.llama_enhanced = j.value("llama_enhanced", c.llama_enhanced);
  c.repetitions = j.value("repetitions", c.repetitions);
  if (c.repetitions < 1)
    throw config_error(ErrorCode::bad_config, "repetitions must be >= 1");
  c.base_seed = j.value("base_seed", c.base_seed);

  const auto base_dir = path.has_parent_path() ? path.parent_path()
                                               : std::filesystem::path(".");
  auto resolve = [&](const json& node, const char* key) -> std::filesystem::path {
    if (!node.contains(key)) return {};
    std::filesystem::path p = node[key].get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  if (j.contains("paths")) {
    const json& p = j["paths"];
    c.paths.tweets = resolve(p, "tweets");
    c.paths.prices = resolve(p, "prices");
    c.paths.intensity_lexicon = resolve(p, "intensity_lexicon");
    c.paths.binary_lexicon = resolve(p, "binary_lexicon");
    c.paths.stopwords = resolve(p, "stopwords");
    c.paths.cache = resolve(p, "cache");
    c.paths.stub_rules = resolve(p, "stub_rules");
    if (p.contains("out_dir")) c.paths.out_dir = resolve(p, "out_dir");
  }

  if (j.contains("model")) {
    const json& m = j["model"];
    c.model.input_dim = m.value("input_dim", c.model.input_dim);
    c.model.hidden_units = m.value("hidden_units", c.model.hidden_units);
    c.model.num_layers = m.value("num_layers", c.model.num_layers);
    c.model.dropout_rate = m.value("dropout_rate", c.model.dropout_rate);
    c.model.num_classes = m.value("num_classes", c.model.num_classes);
    c.model.learning_rate = m.value("learning_rate", c.model.learning_rate);
    c.model.epochs = m.value("epochs", c.model.epochs);
    c.model.batch_size = m.value("batch_size", c.model.batch_size);
    c.model.window = m.value("window", c.model.window);
  }
  validate(c.model);

  c.llm_backend = j.value("llm_backend", c.llm_backend);
  c.classifier_backend = j.value("classifier_backend", c.classifier_backend);
  for (const auto& backend : {c.llm_backend, c.classifier_backend})
    if (backend != "stub" && backend != "replay" && backend != "http")
      throw config_error(ErrorCode::bad_config, "unknown backend: " + backend);

  c.llm_http.url = j.value("llm_url", "");
  c.classifier_http.url = j.value("classifier_url", "");
  const int attempts = j.value("http_attempts", c.llm_http.attempts);
  const int backoff = j.value("http_backoff_ms", c.llm_http.backoff_ms);
  const int in_flight = j.value("max_in_flight", c.llm_http.max_in_flight);
  const int timeout = j.value("http_timeout_s", c.llm_http.timeout_s);
  for (HttpOptions* o : {&c.llm_http, &c.classifier_http}) {
    o->attempts = attempts;
    o->backoff_ms = backoff;
    o->max_in_flight = in_flight;
    o->timeout_s = timeout;
  }

  c.analyze = j.value("analyze", c.analyze);
  if (c.analyze != "text" && c.analyze != "labels")
    throw config_error(ErrorCode::bad_config, "analyze must be text or labels");
  c.sigma_scope = j.value("sigma_scope", c.sigma_scope);
  if (c.sigma_scope != "full" && c.sigma_scope != "train_only")
    throw config_error(ErrorCode::bad_config, "sigma_scope must be full or train_only");
  c.non_trading = j.value("non_trading", c.non_trading);
  if (c.non_trading != "roll_forward" && c.non_trading != "drop")
    throw config_error(ErrorCode::bad_config, "non_trading must be roll_forward or drop");
  c.save_checkpoints = j.value("save_checkpoints", c.save_checkpoints);
  if (c.save_checkpoints != "none" && c.save_checkpoints != "first_run" &&
      c.save_checkpoints != "all")
    throw config_error(ErrorCode::bad_config,
                       "save_checkpoints must be none, first_run, or all");
  c.significance_test = j.value("significance_test", c.significance_test);
  if (c.significance_test != "welch")
    throw config_error(ErrorCode::bad_config, "only the welch significance test is supported");
  c.retry_unparseable = j.value("retry_unparseable", c.retry_unparseable);
  if (c.analyze == "labels" && !c.llama_enhanced)
    throw config_error(ErrorCode::bad_config,
                       "analyze=labels needs llama_enhanced (labels come from the filter step)");

  if (const char* url = std::getenv("EMOSTOCK_LLM_URL")) c.llm_http.url = url;
  if (const char* url = std::getenv("EMOSTOCK_CLASSIFIER_URL")) c.classifier_http.url = url;
  if (const char* key = std::getenv("EMOSTOCK_API_KEY")) {
    c.llm_http.api_key = key;
    c.classifier_http.api_key = key;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Metrics

Metrics compute_metrics(const std::vector<MovementLabel>& predicted,
                        const std::vector<MovementLabel>& actual) {
  if (predicted.size() != actual.size())
    throw data_error(ErrorCode::length_mismatch,
                     "predicted and actual label counts differ");
  if (actual.empty()) throw data_error(ErrorCode::empty, "no labels to score");

  std::size_t correct[3] = {0, 0, 0};
  std::size_t support[3] = {0, 0, 0};
  for (std::size_t k = 0; k < actual.size(); ++k) {
    const auto cls = static_cast<std::size_t>(actual[k]);
    ++support[cls];
    if (predicted[k] == actual[k]) ++correct[cls];
  }
  auto recall = [&](MovementLabel label, bool& undefined) {
    const auto cls = static_cast<std::size_t>(label);
    if (support[cls] == 0) {
      undefined = true;
      return 0.0;
    }
    return static_cast<double>(correct[cls]) / static_cast<double>(support[cls]);
  };

  Metrics m;
  m.si_accuracy = recall(MovementLabel::significant_increase, m.si_undefined);
  m.sd_accuracy = recall(MovementLabel::significant_decrease, m.sd_undefined);
  m.stable_accuracy = recall(MovementLabel::stable, m.stable_undefined);
  m.avg_si_sd = (m.si_accuracy + m.sd_accuracy) / 2.0;
  m.si_support = support[static_cast<std::size_t>(MovementLabel::significant_increase)];
  m.sd_support = support[static_cast<std::size_t>(MovementLabel::significant_decrease)];
  m.stable_support = support[static_cast<std::size_t>(MovementLabel::stable)];
  return m;
}

Metrics mean_metrics(const std::vector<Metrics>& runs) {
  if (runs.empty()) throw data_error(ErrorCode::empty, "no runs to average");
  Metrics mean;
  for (const auto& run : runs) {
    mean.si_accuracy += run.si_accuracy;
    mean.sd_accuracy += run.sd_accuracy;
    mean.stable_accuracy += run.stable_accuracy;
    mean.si_undefined = mean.si_undefined || run.si_undefined;
    mean.sd_undefined = mean.sd_undefined || run.sd_undefined;
    mean.stable_undefined = mean.stable_undefined || run.stable_undefined;
  }
  const auto n = static_cast<double>(runs.size());
  mean.si_accuracy /= n;
  mean.sd_accuracy /= n;
  mean.stable_accuracy /= n;
  mean.avg_si_sd = (mean.si_accuracy + mean.sd_accuracy) / 2.0;
  mean.si_support = runs.front().si_support;
  mean.sd_support = runs.front().sd_support;
  mean.stable_support = runs.front().stable_support;
  return mean;
}

stats::WelchResult compare_significance(const std::vector<double>& runs_a,
                                        const std::vector<double>& runs_b) {
  return stats::welch_t_test(runs_a, runs_b);
}

// ---------------------------------------------------------------------------
// Backends and corpus

BackendBundle make_backends(const ExperimentConfig& config) {
  BackendBundle bundle;
  if (!config.paths.cache.empty())
    bundle.cache = std::make_shared<ResponseCache>(config.paths.cache);

  auto need_cache = [&](const char* who) {
    if (!bundle.cache)
      throw config_error(ErrorCode::bad_config,
                         std::string(who) + " replay backend needs paths.cache");
    return bundle.cache;
  };
  if (config.llm_backend == "stub") {
    bundle.llm = std::make_unique<StubLlm>(
        config.paths.stub_rules.empty() ? StubLlm()
                                        : StubLlm::from_json_file(config.paths.stub_rules));
  } else if (config.llm_backend == "replay") {
    bundle.llm = std::make_unique<ReplayLlm>(need_cache("llm"));
  } else {
    if (config.llm_http.url.empty())
      throw config_error(ErrorCode::bad_config,
                         "http llm backend needs llm_url or EMOSTOCK_LLM_URL");
    bundle.llm = std::make_unique<HttpLlm>(config.llm_http, bundle.cache);
  }
  if (config.classifier_backend == "stub") {
    bundle.classifier = std::make_unique<StubClassifier>();
  } else if (config.classifier_backend == "replay") {
    bundle.classifier = std::make_unique<ReplayClassifier>(need_cache("classifier"));
  } else {
    if (config.classifier_http.url.empty())
      throw config_error(ErrorCode::bad_config,
                         "http classifier backend needs classifier_url or "
                         "EMOSTOCK_CLASSIFIER_URL");
    bundle.classifier = std::make_unique<HttpClassifier>(config.classifier_http, bundle.cache);
  }
  return bundle;
}

CorpusBundle load_corpus(const ExperimentConfig& config, const std::string& ticker) {
  return stage("ingest", [&] {
    CorpusBundle corpus;
    auto in_range = [&](const Date& d) {
      if (config.start_date && d < *config.start_date) return false;
      if (config.end_date && *config.end_date < d) return false;
      return true;
    };

    if (!config.paths.tweets.empty()) {
      auto parsed = parse_tweets(read_file(with_ticker(config.paths.tweets, ticker)));
      for (auto& tweet : parsed.tweets)
        if (tweet.ticker == ticker && in_range(tweet.date))
          corpus.tweets.push_back(std::move(tweet));
    }

    if (config.paths.prices.empty())
      throw config_error(ErrorCode::bad_config, "config is missing paths.prices");
    auto prices = parse_prices(read_file(with_ticker(config.paths.prices, ticker)));
    for (auto& bar : prices)
      if (in_range(bar.date)) corpus.prices.push_back(std::move(bar));
    if (corpus.prices.size() < 2)
      throw data_error(ErrorCode::too_short,
                       ticker + ": fewer than two trading days in range");
    return corpus;
  });
}

// ---------------------------------------------------------------------------
// Scoring and dataset assembly

ScoredCorpus score_corpus(const ExperimentConfig& config, const CorpusBundle& corpus,
                          const std::string& mode, BackendBundle& backends) {
  if (mode == "baseline")
    throw config_error(ErrorCode::bad_config, "baseline mode has no emotion scoring");
  const EmotionMethod method = method_of(mode);

  ScoredCorpus out;
  const StopwordSet stopwords = config.paths.stopwords.empty()
                                    ? StopwordSet()
                                    : StopwordSet::load(config.paths.stopwords);
  if (config.llama_enhanced) {
    FilterResult filtered = stage("preprocess", [&] {
      FilterOptions options;
      options.max_in_flight = config.llm_http.max_in_flight;
      options.retry_unparseable = config.retry_unparseable;
      return filter_and_annotate(corpus.tweets, *backends.llm, stopwords, options);
    });
    out.kept = std::move(filtered.kept);
    out.filter_stats = std::move(filtered.stats);
  } else {
    for (const auto& tweet : corpus.tweets)
      out.kept.push_back({tweet, LlmAnnotation{}, clean_text(tweet.text, stopwords)});
  }

  stage("emotion scoring", [&] {
    std::optional<Lexicon> lexicon;
    if (method == EmotionMethod::m2) {
      if (config.paths.intensity_lexicon.empty())
        throw config_error(ErrorCode::bad_config, "m2 needs paths.intensity_lexicon");
      lexicon = Lexicon::load(config.paths.intensity_lexicon, LexiconKind::intensity);
    } else if (method == EmotionMethod::m3) {
      if (config.paths.binary_lexicon.empty())
        throw config_error(ErrorCode::bad_config, "m3 needs paths.binary_lexicon");
      lexicon = Lexicon::load(config.paths.binary_lexicon, LexiconKind::binary);
    }

    for (const auto& annotated : out.kept) {
      ScoredTweet scored;
      scored.date = annotated.tweet.date;
      if (method == EmotionMethod::m1) {
        scored.emotion = score_transformer(annotated.tweet.text, *backends.classifier);
      } else if (config.analyze == "labels") {
        std::vector<std::string> words;
        for (const auto& label : annotated.annotation.labels) {
          std::istringstream split(label);
          std::string word;
          while (split >> word) words.push_back(word);
        }
        scored.emotion = score_lexicon(words, *lexicon);
      } else {
        scored.emotion = score_lexicon(annotated.tokens, *lexicon);
      }
      out.scored.push_back(std::move(scored));
    }
    return 0;
  });
  return out;
}

DatasetBuild build_dataset(const ExperimentConfig& config, const CorpusBundle& corpus,
                           const std::string& mode, BackendBundle& backends) {
  DatasetBuild build;
  const auto labels = stage("label", [&] {
    const auto changes = percent_change(corpus.prices);
    std::vector<double> scope(changes);
    if (config.sigma_scope == "train_only") {
      const auto train_rows = static_cast<std::size_t>(
          std::floor(0.7 * static_cast<double>(changes.size())));
      scope.assign(changes.begin(), changes.begin() + static_cast<long>(train_rows));
    }
    const SigmaResult s = sigma(scope);
    build.sigma_value = s.value;
    build.degenerate_sigma = s.degenerate;
    return label_movements(changes, s.value);
  });
  build.distribution = count_labels(labels);

  if (mode == "baseline") {
    build.table = stage("assemble",
                        [&] { return build_rows(corpus.prices, nullptr,
                                                EmotionMethod::m2, labels); });
    return build;
  }

  ScoredCorpus scored = score_corpus(config, corpus, mode, backends);
  build.filter_stats = scored.filter_stats;

  const auto daily = stage("aggregate", [&] {
    std::map<Date, std::size_t> raw_counts;
    for (const auto& tweet : corpus.tweets) ++raw_counts[tweet.date];
    std::vector<Date> trading_days;
    trading_days.reserve(corpus.prices.size());
    for (const auto& bar : corpus.prices) trading_days.push_back(bar.date);
    const auto policy = config.non_trading == "drop" ? NonTradingPolicy::drop
                                                     : NonTradingPolicy::roll_forward;
    return aggregate_daily(scored.scored, raw_counts, trading_days, policy, method_of(mode));
  });

  build.table = stage("assemble", [&] {
    return build_rows(corpus.prices, &daily, method_of(mode), labels);
  });
  return build;
}

// ---------------------------------------------------------------------------
// Experiments

std::vector<double> ExperimentReport::run_avgs() const {
  std::vector<double> avgs;
  avgs.reserve(runs.size());
  for (const auto& run : runs) avgs.push_back(run.avg_si_sd);
  return avgs;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const std::string& ticker,
                                const std::string& mode) {
  if (!kModes.count(mode))
    throw config_error(ErrorCode::bad_config, "unknown mode: " + mode);

  BackendBundle backends = make_backends(config);
  const CorpusBundle corpus = load_corpus(config, ticker);
  DatasetBuild build = build_dataset(config, corpus, mode, backends);
  const SplitDataset split = stage("split", [&] { return split_and_scale(build.table); });

  ModelConfig model = config.model;
  model.input_dim = static_cast<int>(build.table.feature_names.size());

  ExperimentReport report;
  report.ticker = ticker;
  report.mode = mode;
  report.enhanced = mode != "baseline" && config.llama_enhanced;
  report.filter_stats = std::move(build.filter_stats);
  report.distribution = build.distribution;
  report.sigma_value = build.sigma_value;

  std::vector<MovementLabel> actual;
  for (std::size_t k = static_cast<std::size_t>(model.window) - 1; k < split.test.rows.size();
       ++k)
    actual.push_back(split.test.rows[k].label);

  for (int run = 0; run < config.repetitions; ++run) {
    model.seed = config.base_seed + static_cast<std::uint64_t>(run);
    const TrainResult trained = stage("train", [&] { return train(split, model); });
    const auto predicted = to_labels(predict(trained.params, model, split.test));
    report.runs.push_back(compute_metrics(predicted, actual));

    const bool keep = config.save_checkpoints == "all" ||
                      (config.save_checkpoints == "first_run" && run == 0);
    if (keep) {
      std::filesystem::create_directories(config.paths.out_dir);
      const auto name = "checkpoint_" + ticker + "_" + mode +
                        (report.enhanced ? "_enhanced" : "") + "_run" +
                        std::to_string(run) + ".json";
      save_checkpoint(config.paths.out_dir / name, trained.params, model);
    }
  }
  report.mean = mean_metrics(report.runs);
  return report;
}

SuiteReport run_suite(const ExperimentConfig& config) {
  SuiteReport suite;
  suite.config = config;
  for (const auto& ticker : config.tickers)
    for (const auto& mode : config.modes)
      suite.experiments.push_back(run_experiment(config, ticker, mode));

  const bool has_baseline =
      std::find(config.modes.begin(), config.modes.end(), "baseline") != config.modes.end();
  if (!has_baseline || config.repetitions < 2) return suite;

  auto find_report = [&](const std::string& ticker,
                         const std::string& mode) -> const ExperimentReport* {
    for (const auto& report : suite.experiments)
      if (report.ticker == ticker && report.mode == mode) return &report;
    return nullptr;
  };

  for (const auto& mode : config.modes) {
    if (mode == "baseline") continue;
    std::vector<double> pooled_mode, pooled_base;
    bool enhanced = false;
    for (const auto& ticker : config.tickers) {
      const ExperimentReport* method = find_report(ticker, mode);
      const ExperimentReport* base = find_report(ticker, "baseline");
      if (!method || !base) continue;
      enhanced = method->enhanced;
      const auto a = method->run_avgs();
      const auto b = base->run_avgs();
      suite.significance.push_back({ticker, mode, method->enhanced,
                                    compare_significance(a, b)});
      pooled_mode.insert(pooled_mode.end(), a.begin(), a.end());
      pooled_base.insert(pooled_base.end(), b.begin(), b.end());
    }
    if (pooled_mode.size() >= 2 && pooled_base.size() >= 2)
      suite.significance.push_back({"pooled", mode, enhanced,
                                    compare_significance(pooled_mode, pooled_base)});
  }
  return suite;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_percent(double fraction) {
  // Half-up at one decimal of the percentage; the small nudge keeps values
  // that are exact halves in decimal (e.g. 0.1345) from landing low.
  const double tenths = std::floor(fraction * 1000.0 + 0.5 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", tenths / 10.0);
  return buf;
}

namespace {

std::string method_cell(const ExperimentReport& report) {
  std::string cell = display_mode(report.mode);
  if (report.enhanced) cell += " (filtered)";
  return cell;
}

void render_metrics_row(std::ostream& out, const std::string& name, const Metrics& m) {
  out << "| " << name << " | " << render_percent(m.si_accuracy) << " | "
      << render_percent(m.sd_accuracy) << " | " << render_percent(m.stable_accuracy)
      << " | " << render_percent(m.avg_si_sd) << " |\n";
}

constexpr const char* kTableHeader =
    "| Method | S-I | S-D | Stable | Average S-I & S-D |\n"
    "| --- | --- | --- | --- | --- |\n";

}  // namespace

std::string render_markdown(const SuiteReport& suite) {
  std::ostringstream out;
  out << "# Movement Prediction Report\n";

  const ExperimentConfig& c = suite.config;
  auto join = [](const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) {
      if (!s.empty()) s += ", ";
      s += p;
    }
    return s;
  };
  out << "\n## Configuration\n\n"
      << "- tickers: " << join(c.tickers) << "\n"
      << "- modes: " << join(c.modes) << "\n"
      << "- llama_enhanced: " << (c.llama_enhanced ? "true" : "false") << "\n"
      << "- repetitions: " << c.repetitions << " (seeds " << c.base_seed << ".."
      << c.base_seed + static_cast<std::uint64_t>(c.repetitions - 1) << ")\n"
      << "- backends: llm=" << c.llm_backend << ", classifier=" << c.classifier_backend
      << "\n"
      << "- analyze: " << c.analyze << ", sigma_scope: " << c.sigma_scope
      << ", non_trading: " << c.non_trading << "\n"
      << "- model: hidden=" << c.model.hidden_units << ", layers=" << c.model.num_layers
      << ", dropout=" << c.model.dropout_rate << ", lr=" << c.model.learning_rate
      << ", epochs=" << c.model.epochs << ", batch=" << c.model.batch_size
      << ", window=" << c.model.window << "\n"
      << "- significance: " << c.significance_test << " on per-run Average S-I & S-D\n";

  std::vector<std::string> tickers;
  for (const auto& report : suite.experiments)
    if (std::find(tickers.begin(), tickers.end(), report.ticker) == tickers.end())
      tickers.push_back(report.ticker);

  for (const auto& ticker : tickers) {
    out << "\n## " << ticker << "\n\n" << kTableHeader;
    for (const auto& report : suite.experiments)
      if (report.ticker == ticker) render_metrics_row(out, method_cell(report), report.mean);
  }

  // cross-ticker average, mirroring the per-ticker tables
  out << "\n## Average\n\n" << kTableHeader;
  std::vector<std::pair<std::string, bool>> seen;
  for (const auto& report : suite.experiments) {
    const auto key = std::make_pair(report.mode, report.enhanced);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    std::vector<Metrics> across;
    for (const auto& other : suite.experiments)
      if (other.mode == report.mode && other.enhanced == report.enhanced)
        across.push_back(other.mean);
    render_metrics_row(out, method_cell(report), mean_metrics(across));
  }

  if (!suite.significance.empty()) {
    out << "\n## Significance\n\n"
        << "Welch's two-sample t-test on the per-run Average S-I & S-D values of each "
           "method against the baseline; two-tailed p.\n\n"
        << "| Scope | Method | t | dof | p |\n| --- | --- | --- | --- | --- |\n";
    for (const auto& row : suite.significance) {
      char t_buf[32], dof_buf[32], p_buf[32];
      std::snprintf(t_buf, sizeof t_buf, "%.4g", row.welch.t);
      std::snprintf(dof_buf, sizeof dof_buf, "%.4g", row.welch.dof);
      std::snprintf(p_buf, sizeof p_buf, "%.6g", row.welch.p);
      out << "| " << row.ticker << " | " << display_mode(row.mode)
          << (row.enhanced ? " (filtered)" : "") << " | " << t_buf << " | " << dof_buf
          << " | " << p_buf << " |\n";
    }
  }
  return out.str();
}

std::string render_csv(const SuiteReport& suite) {
  std::ostringstream out;
  out << "ticker,method,enhanced,metric,value\n";
  for (const auto& report : suite.experiments) {
    const std::string enhanced = report.enhanced ? "true" : "false";
    const std::pair<const char*, double> metrics[] = {
        {"si_accuracy", report.mean.si_accuracy},
        {"sd_accuracy", report.mean.sd_accuracy},
        {"stable_accuracy", report.mean.stable_accuracy},
        {"avg_si_sd", report.mean.avg_si_sd},
    };
    for (const auto& [name, value] : metrics) {
      const std::string fields[] = {report.ticker, report.mode, enhanced, name,
                                    format_g17(value)};
      csv::write_row(out, fields);
    }
  }
  return out.str();
}

std::string render_distribution_csv(const SuiteReport& suite) {
  std::vector<std::pair<std::string, ClassDistribution>> rows;
  for (const auto& report : suite.experiments) {
    const bool seen = std::any_of(rows.begin(), rows.end(), [&](const auto& row) {
      return row.first == report.ticker;
    });
    if (!seen) rows.emplace_back(report.ticker, report.distribution);
  }
  return distribution_csv(rows);
}

std::string render_filter_stats_csv(const SuiteReport& suite) {
  FilterStats merged;
  for (const auto& report : suite.experiments)
    for (const auto& [ticker, counts] : report.filter_stats.per_ticker)
      if (!merged.per_ticker.count(ticker)) merged.per_ticker[ticker] = counts;
  return merged.to_csv();
}

void write_reports(const SuiteReport& suite, const std::filesystem::path& out_dir,
                   const std::string& format) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::filesystem::path& name, const std::string& text) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out)
      throw config_error(ErrorCode::bad_config,
                         "cannot write report file: " + (out_dir / name).string());
    out << text;
  };
  if (format == "md") {
    write("report.md", render_markdown(suite));
  } else if (format == "csv") {
    write("report.csv", render_csv(suite));
  } else {
    throw config_error(ErrorCode::bad_config, "report format must be md or csv");
  }
  write("class_distribution.csv", render_distribution_csv(suite));
  write("filter_stats.csv", render_filter_stats_csv(suite));
}

}  // namespace emostock
