// Command-line front end. Every subcommand reads the same JSON experiment
// config; individual flags override single fields where that is useful for
// scripting (backend choice, cache path, report format, output directory).
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "emostock/csv.hpp"
#include "emostock/dataset.hpp"
#include "emostock/emotion.hpp"
#include "emostock/errors.hpp"
#include "emostock/experiment.hpp"
#include "emostock/ingest.hpp"
#include "emostock/lstm.hpp"
#include "emostock/preprocess.hpp"

namespace {

using namespace emostock;

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw config_error(ErrorCode::bad_config, "cannot write " + path.string());
  out << text;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string ticker;  // empty: every configured ticker
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment JSON config")->required();
  cmd->add_option("--out", args.out_dir, "output directory (default: config out_dir)");
  cmd->add_option("--ticker", args.ticker, "restrict to one configured ticker");
}

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig config = load_experiment_config(args.config_path);
  if (!args.out_dir.empty()) config.paths.out_dir = args.out_dir;
  if (!args.ticker.empty()) config.tickers = {args.ticker};
  return config;
}

std::filesystem::path out_dir_of(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.paths.out_dir);
  return config.paths.out_dir;
}

int run_ingest(const CommonArgs& args) {
  ExperimentConfig config = load_config(args);
  const auto dir = out_dir_of(config);
  for (const auto& ticker : config.tickers) {
    CorpusBundle corpus = load_corpus(config, ticker);
    write_file(dir / (ticker + "_tweets.csv"), to_csv(corpus.tweets));
    write_file(dir / (ticker + "_prices.csv"), to_csv(corpus.prices));
    const AlignmentReport alignment = align(corpus.tweets, corpus.prices);
    std::cout << ticker << ": " << corpus.tweets.size() << " tweets, "
              << alignment.trading_day_count << " trading days, "
              << alignment.non_trading_tweet_days << " tweet dates off-calendar\n";
  }
  return 0;
}

int run_preprocess(const CommonArgs& args, const std::string& backend,
                   const std::string& cache) {
  ExperimentConfig config = load_config(args);
  if (!backend.empty()) config.llm_backend = backend;
  if (!cache.empty()) config.paths.cache = cache;
  const auto dir = out_dir_of(config);

  BackendBundle backends = make_backends(config);
  const StopwordSet stopwords = config.paths.stopwords.empty()
                                    ? StopwordSet()
                                    : StopwordSet::load(config.paths.stopwords);
  FilterStats all_stats;
  for (const auto& ticker : config.tickers) {
    CorpusBundle corpus = load_corpus(config, ticker);
    FilterOptions options;
    options.max_in_flight = config.llm_http.max_in_flight;
    options.retry_unparseable = config.retry_unparseable;
    FilterResult result = filter_and_annotate(corpus.tweets, *backends.llm,
                                              stopwords, options);
    std::ostringstream rows;
    rows << "date,ticker,labels,tokens\n";
    for (const auto& kept : result.kept) {
      std::string labels, tokens;
      for (const auto& label : kept.annotation.labels) {
        if (!labels.empty()) labels += ", ";
        labels += label;
      }
      for (const auto& token : kept.tokens) {
        if (!tokens.empty()) tokens += ' ';
        tokens += token;
      }
      const std::string fields[] = {kept.tweet.date.iso(), kept.tweet.ticker, labels,
                                    tokens};
      csv::write_row(rows, fields);
    }
    write_file(dir / (ticker + "_annotated.csv"), rows.str());
    for (const auto& [name, counts] : result.stats.per_ticker)
      all_stats.per_ticker[name] = counts;
  }
  write_file(dir / "filter_stats.csv", all_stats.to_csv());
  return 0;
}

int run_featurize(const CommonArgs& args, const std::string& method, bool enhanced) {
  ExperimentConfig config = load_config(args);
  if (enhanced) config.llama_enhanced = true;
  const auto dir = out_dir_of(config);
  const std::string mode = method.empty() ? config.modes.front() : method;

  BackendBundle backends = make_backends(config);
  for (const auto& ticker : config.tickers) {
    const CorpusBundle corpus = load_corpus(config, ticker);
    const DatasetBuild build = build_dataset(config, corpus, mode, backends);
    write_file(dir / (ticker + "_" + mode + "_dataset.csv"), to_csv(build.table));
  }
  return 0;
}

int run_label(const CommonArgs& args) {
  ExperimentConfig config = load_config(args);
  const auto dir = out_dir_of(config);
  std::vector<std::pair<std::string, ClassDistribution>> rows;
  for (const auto& ticker : config.tickers) {
    const CorpusBundle corpus = load_corpus(config, ticker);
    const auto changes = percent_change(corpus.prices);
    const SigmaResult s = sigma(changes);
    const auto labels = label_movements(changes, s.value);
    rows.emplace_back(ticker, count_labels(labels));
    std::cout << ticker << ": sigma " << s.value << (s.degenerate ? " (degenerate)" : "")
              << ", " << labels.size() << " labeled days\n";
  }
  write_file(dir / "class_distribution.csv", distribution_csv(rows));
  return 0;
}

int run_train(const CommonArgs& args, const std::string& mode_flag, int run_index) {
  ExperimentConfig config = load_config(args);
  const auto dir = out_dir_of(config);
  const std::string mode = mode_flag.empty() ? config.modes.front() : mode_flag;
  const std::string ticker = config.tickers.front();

  BackendBundle backends = make_backends(config);
  const CorpusBundle corpus = load_corpus(config, ticker);
  const DatasetBuild build = build_dataset(config, corpus, mode, backends);
  const SplitDataset split = split_and_scale(build.table);

  ModelConfig model = config.model;
  model.input_dim = static_cast<int>(build.table.feature_names.size());
  model.seed = config.base_seed + static_cast<std::uint64_t>(run_index);
  const TrainResult trained = train(split, model);

  const bool enhanced = mode != "baseline" && config.llama_enhanced;
  const std::string tag =
      ticker + "_" + mode + (enhanced ? "_enhanced" : "") + "_run" +
      std::to_string(run_index);
  const auto name = "checkpoint_" + tag + ".json";
  save_checkpoint(dir / name, trained.params, model);
  std::ostringstream trace;
  trace << "epoch,loss\n";
  for (std::size_t e = 0; e < trained.loss_trace.size(); ++e)
    trace << e << ',' << trained.loss_trace[e] << '\n';
  write_file(dir / ("loss_" + tag + ".csv"), trace.str());
  std::cout << "saved " << (dir / name).string() << "\n";
  return 0;
}

int run_evaluate(const CommonArgs& args, const std::string& checkpoint,
                 const std::string& mode_flag) {
  ExperimentConfig config = load_config(args);
  const std::string mode = mode_flag.empty() ? config.modes.front() : mode_flag;
  const std::string ticker = config.tickers.front();

  auto [params, model] = load_checkpoint(checkpoint);
  BackendBundle backends = make_backends(config);
  const CorpusBundle corpus = load_corpus(config, ticker);
  const DatasetBuild build = build_dataset(config, corpus, mode, backends);
  const SplitDataset split = split_and_scale(build.table);

  const auto predicted = to_labels(predict(params, model, split.test));
  std::vector<MovementLabel> actual;
  for (std::size_t k = static_cast<std::size_t>(model.window) - 1;
       k < split.test.rows.size(); ++k)
    actual.push_back(split.test.rows[k].label);
  const Metrics m = compute_metrics(predicted, actual);

  std::cout << "ticker,method,metric,value\n";
  const std::pair<const char*, double> out[] = {
      {"si_accuracy", m.si_accuracy},
      {"sd_accuracy", m.sd_accuracy},
      {"stable_accuracy", m.stable_accuracy},
      {"avg_si_sd", m.avg_si_sd},
  };
  for (const auto& [metric, value] : out)
    std::cout << ticker << ',' << mode << ',' << metric << ',' << value << '\n';
  return 0;
}

int run_suite_cmd(const CommonArgs& args, const std::string& format,
                  const std::string& checkpoints, bool both_formats) {
  ExperimentConfig config = load_config(args);
  if (!checkpoints.empty()) config.save_checkpoints = checkpoints;
  const SuiteReport suite = run_suite(config);
  if (both_formats) {
    write_reports(suite, config.paths.out_dir, "md");
    write_reports(suite, config.paths.out_dir, "csv");
  } else {
    write_reports(suite, config.paths.out_dir, format);
  }
  for (const auto& report : suite.experiments)
    std::cout << report.ticker << ' ' << display_mode(report.mode)
              << (report.enhanced ? " (filtered)" : "") << ": avg S-I & S-D "
              << render_percent(report.mean.avg_si_sd) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emotion-aware stock movement prediction pipeline"};
  app.require_subcommand(1);

  CommonArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "validate and normalize raw inputs");
  add_common(ingest_cmd, ingest_args);

  CommonArgs preprocess_args;
  std::string llm_backend_flag, cache_flag;
  auto* preprocess_cmd =
      app.add_subcommand("preprocess", "LLM emotion filter and text cleanup");
  add_common(preprocess_cmd, preprocess_args);
  preprocess_cmd->add_option("--llm-backend", llm_backend_flag, "http|replay|stub")
      ->check(CLI::IsMember({"http", "replay", "stub"}));
  preprocess_cmd->add_option("--cache", cache_flag, "response cache JSONL path");

  CommonArgs featurize_args;
  std::string method_flag;
  bool enhanced_flag = false;
  auto* featurize_cmd =
      app.add_subcommand("featurize", "build per-day feature tables");
  add_common(featurize_cmd, featurize_args);
  featurize_cmd->add_option("--method", method_flag, "baseline|m1|m2|m3")
      ->check(CLI::IsMember({"baseline", "m1", "m2", "m3"}));
  featurize_cmd->add_flag("--enhanced", enhanced_flag, "apply the LLM filter first");

  CommonArgs label_args;
  auto* label_cmd = app.add_subcommand("label", "movement labels and class counts");
  add_common(label_cmd, label_args);

  CommonArgs train_args;
  std::string train_mode;
  int run_index = 0;
  auto* train_cmd = app.add_subcommand("train", "train one run and save a checkpoint");
  add_common(train_cmd, train_args);
  train_cmd->add_option("--mode", train_mode, "baseline|m1|m2|m3");
  train_cmd->add_option("--run", run_index, "run index (seed = base_seed + run)");

  CommonArgs eval_args;
  std::string eval_checkpoint, eval_mode;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a checkpoint on the test split");
  add_common(eval_cmd, eval_args);
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint JSON")->required();
  eval_cmd->add_option("--mode", eval_mode, "baseline|m1|m2|m3");

  CommonArgs report_args;
  std::string report_format = "md";
  std::string report_checkpoints;
  auto* report_cmd = app.add_subcommand("report", "run the suite and render one format");
  add_common(report_cmd, report_args);
  report_cmd->add_option("--format", report_format, "md|csv")
      ->check(CLI::IsMember({"md", "csv"}));
  report_cmd->add_option("--checkpoints", report_checkpoints, "none|first_run|all")
      ->check(CLI::IsMember({"none", "first_run", "all"}));

  CommonArgs run_args;
  std::string run_checkpoints;
  auto* run_cmd = app.add_subcommand("run", "full pipeline, all report formats");
  add_common(run_cmd, run_args);
  run_cmd->add_option("--checkpoints", run_checkpoints, "none|first_run|all")
      ->check(CLI::IsMember({"none", "first_run", "all"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest_cmd->parsed()) return run_ingest(ingest_args);
    if (preprocess_cmd->parsed())
      return run_preprocess(preprocess_args, llm_backend_flag, cache_flag);
    if (featurize_cmd->parsed())
      return run_featurize(featurize_args, method_flag, enhanced_flag);
    if (label_cmd->parsed()) return run_label(label_args);
    if (train_cmd->parsed()) return run_train(train_args, train_mode, run_index);
    if (eval_cmd->parsed()) return run_evaluate(eval_args, eval_checkpoint, eval_mode);
    if (report_cmd->parsed())
      return run_suite_cmd(report_args, report_format, report_checkpoints, false);
    if (run_cmd->parsed()) return run_suite_cmd(run_args, "md", run_checkpoints, true);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
