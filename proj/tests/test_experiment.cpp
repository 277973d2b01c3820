#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "emostock/errors.hpp"
#include "emostock/experiment.hpp"

using namespace emostock;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::network;  // sentinel: not thrown by these paths
}

constexpr MovementLabel kSt = MovementLabel::stable;
constexpr MovementLabel kSi = MovementLabel::significant_increase;
constexpr MovementLabel kSd = MovementLabel::significant_decrease;

}  // namespace

TEST_CASE("per-class recall fixed points") {
  std::vector<MovementLabel> actual = {kSi, kSi, kSd, kSd, kSt, kSt};

  auto perfect = compute_metrics(actual, actual);
  CHECK(perfect.si_accuracy == 1.0);
  CHECK(perfect.sd_accuracy == 1.0);
  CHECK(perfect.stable_accuracy == 1.0);
  CHECK(perfect.avg_si_sd == 1.0);
  CHECK(perfect.si_support == 2);
  CHECK(perfect.sd_support == 2);
  CHECK(perfect.stable_support == 2);
  CHECK_FALSE(perfect.si_undefined);

  std::vector<MovementLabel> inverted = {kSd, kSd, kSi, kSi, kSi, kSd};
  auto wrong = compute_metrics(inverted, actual);
  CHECK(wrong.si_accuracy == 0.0);
  CHECK(wrong.sd_accuracy == 0.0);
  CHECK(wrong.stable_accuracy == 0.0);
  CHECK(wrong.avg_si_sd == 0.0);

  std::vector<MovementLabel> half = {kSi, kSt, kSd, kSt, kSt, kSt};
  auto m = compute_metrics(half, actual);
  CHECK(m.si_accuracy == 0.5);
  CHECK(m.sd_accuracy == 0.5);
  CHECK(m.stable_accuracy == 1.0);
  CHECK(m.avg_si_sd == 0.5);
}

TEST_CASE("zero-support classes score zero and are flagged") {
  std::vector<MovementLabel> actual = {kSt, kSt, kSi};
  std::vector<MovementLabel> predicted = {kSt, kSi, kSi};
  auto m = compute_metrics(predicted, actual);
  CHECK(m.sd_support == 0);
  CHECK(m.sd_accuracy == 0.0);
  CHECK(m.sd_undefined);
  CHECK_FALSE(m.si_undefined);
  CHECK_FALSE(m.stable_undefined);
  CHECK(m.avg_si_sd == 0.5);  // (1.0 + 0.0) / 2

  CHECK(code_of([&] { compute_metrics({kSt}, actual); }) == ErrorCode::length_mismatch);
  CHECK(code_of([] { compute_metrics({}, {}); }) == ErrorCode::empty);
}

TEST_CASE("percent rendering rounds half up at one decimal") {
  CHECK(render_percent(0.385) == "38.5%");
  CHECK(render_percent(0.263) == "26.3%");
  CHECK(render_percent(0.006) == "0.6%");
  CHECK(render_percent((0.263 + 0.006) / 2.0) == "13.5%");  // 13.45 rounds up
  CHECK(render_percent(0.0) == "0.0%");
  CHECK(render_percent(1.0) == "100.0%");
  CHECK(render_percent(0.5) == "50.0%");
  CHECK(render_percent(0.9994) == "99.9%");
  CHECK(render_percent(0.99951) == "100.0%");
}

TEST_CASE("run means average accuracies and keep the first run's supports") {
  Metrics a;
  a.si_accuracy = 1.0;
  a.sd_accuracy = 0.5;
  a.stable_accuracy = 0.25;
  a.si_support = 4;
  a.sd_support = 5;
  a.stable_support = 6;
  Metrics b = a;
  b.si_accuracy = 0.0;
  b.sd_accuracy = 1.0;
  b.stable_accuracy = 0.75;
  b.sd_undefined = true;
  b.si_support = 99;  // later runs should not override the supports

  auto mean = mean_metrics({a, b});
  CHECK(mean.si_accuracy == 0.5);
  CHECK(mean.sd_accuracy == 0.75);
  CHECK(mean.stable_accuracy == 0.5);
  CHECK(mean.avg_si_sd == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(mean.si_support == 4);
  CHECK(mean.sd_support == 5);
  CHECK(mean.stable_support == 6);
  CHECK(mean.sd_undefined);
  CHECK_FALSE(mean.si_undefined);

  CHECK(code_of([] { mean_metrics({}); }) == ErrorCode::empty);
}

TEST_CASE("significance comparison separates well-split run scores") {
  std::vector<double> strong = {0.91, 0.89, 0.90, 0.92, 0.88};
  std::vector<double> weak = {0.11, 0.09, 0.10, 0.12, 0.08};
  auto r = compare_significance(strong, weak);
  CHECK(r.t > 10.0);
  CHECK(r.p < 0.001);

  CHECK(code_of([] { compare_significance({0.5}, {0.6, 0.7}); }) ==
        ErrorCode::too_few_runs);
}

TEST_CASE("run_avgs extracts the per-run averages in order") {
  ExperimentReport report;
  Metrics m;
  m.avg_si_sd = 0.25;
  report.runs.push_back(m);
  m.avg_si_sd = 0.75;
  report.runs.push_back(m);
  CHECK(report.run_avgs() == std::vector<double>{0.25, 0.75});
}

TEST_CASE("feature widths and display names per mode") {
  CHECK(feature_width("baseline") == 5);
  CHECK(feature_width("m1") == 13);   // 5 price + 7 emotions + tweet volume
  CHECK(feature_width("m2") == 14);   // 8 emotions
  CHECK(feature_width("m3") == 16);   // 10 emotions
  CHECK(code_of([] { feature_width("m4"); }) == ErrorCode::bad_config);

  CHECK(display_mode("baseline") == "Baseline");
  CHECK(display_mode("m1") == "Transformer");
  CHECK(display_mode("m2") == "Intensity Lexicon");
  CHECK(display_mode("m3") == "Association Lexicon");
}

namespace {

class TempConfigDir {
 public:
  TempConfigDir() {
    dir_ = std::filesystem::temp_directory_path() / "emostock_config_test";
    std::filesystem::create_directories(dir_);
  }
  ~TempConfigDir() { std::filesystem::remove_all(dir_); }

  std::filesystem::path write(const std::string& name, const std::string& body) {
    auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    return path;
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace

TEST_CASE("config loading: defaults, paths and validation") {
  TempConfigDir tmp;

  auto minimal = tmp.write("minimal.json", R"({
    "ticker": "ABC",
    "mode": "baseline",
    "paths": {"prices": "p.csv", "out_dir": "reports"}
  })");
  auto c = load_experiment_config(minimal);
  CHECK(c.tickers == std::vector<std::string>{"ABC"});
  CHECK(c.modes == std::vector<std::string>{"baseline"});
  CHECK(c.repetitions == 10);
  CHECK(c.base_seed == 1);
  CHECK_FALSE(c.llama_enhanced);
  CHECK(c.llm_backend == "stub");
  CHECK(c.analyze == "text");
  CHECK(c.sigma_scope == "full");
  CHECK(c.non_trading == "roll_forward");
  CHECK(c.save_checkpoints == "none");
  CHECK(c.significance_test == "welch");
  CHECK(c.paths.prices == tmp.dir() / "p.csv");  // relative to the config file
  CHECK(c.paths.out_dir == tmp.dir() / "reports");
  CHECK(c.paths.tweets.empty());
  CHECK(c.model.hidden_units == 128);
  CHECK(c.model.window == 1);
  CHECK_FALSE(c.start_date.has_value());

  auto full = tmp.write("full.json", R"({
    "tickers": ["TSLA", "AAPL"],
    "modes": ["baseline", "m2", "m3"],
    "llama_enhanced": true,
    "start_date": "2021-09-30",
    "end_date": "2022-09-30",
    "repetitions": 3,
    "base_seed": 11,
    "analyze": "labels",
    "sigma_scope": "train_only",
    "non_trading": "drop",
    "save_checkpoints": "all",
    "retry_unparseable": true,
    "model": {"hidden_units": 16, "epochs": 7, "window": 2, "dropout_rate": 0.1},
    "paths": {"prices": "/abs/p.csv", "tweets": "t.csv"}
  })");
  auto f = load_experiment_config(full);
  CHECK(f.tickers == std::vector<std::string>{"TSLA", "AAPL"});
  CHECK(f.modes == std::vector<std::string>{"baseline", "m2", "m3"});
  CHECK(f.llama_enhanced);
  CHECK(f.start_date->iso() == "2021-09-30");
  CHECK(f.end_date->iso() == "2022-09-30");
  CHECK(f.repetitions == 3);
  CHECK(f.base_seed == 11);
  CHECK(f.analyze == "labels");
  CHECK(f.sigma_scope == "train_only");
  CHECK(f.non_trading == "drop");
  CHECK(f.save_checkpoints == "all");
  CHECK(f.retry_unparseable);
  CHECK(f.model.hidden_units == 16);
  CHECK(f.model.epochs == 7);
  CHECK(f.model.window == 2);
  CHECK(f.model.dropout_rate == 0.1);
  CHECK(f.paths.prices == "/abs/p.csv");  // absolute paths stay put
  CHECK(f.paths.tweets == tmp.dir() / "t.csv");

  auto expect_bad = [&](const char* name, const std::string& body) {
    auto path = tmp.write(name, body);
    CHECK(code_of([&] { load_experiment_config(path); }) == ErrorCode::bad_config);
  };
  expect_bad("nojson.json", "{nope");
  expect_bad("badmode.json", R"({"ticker": "A", "mode": "m9"})");
  expect_bad("noticker.json", R"({"tickers": []})");
  expect_bad("reps.json", R"({"ticker": "A", "repetitions": 0})");
  expect_bad("order.json",
             R"({"ticker": "A", "start_date": "2022-01-01", "end_date": "2021-01-01"})");
  expect_bad("baddate.json", R"({"ticker": "A", "start_date": "01/02/2021"})");
  expect_bad("analyze.json", R"({"ticker": "A", "analyze": "sentiment"})");
  expect_bad("labels.json", R"({"ticker": "A", "analyze": "labels"})");
  expect_bad("backend.json", R"({"ticker": "A", "llm_backend": "local"})");
  expect_bad("sigtest.json", R"({"ticker": "A", "significance_test": "ttest"})");
  expect_bad("ckpt.json", R"({"ticker": "A", "save_checkpoints": "sometimes"})");
  expect_bad("model.json", R"({"ticker": "A", "model": {"hidden_units": 0}})");
}

TEST_CASE("environment variables override endpoint settings") {
  TempConfigDir tmp;
  auto path = tmp.write("env.json", R"({
    "ticker": "ABC",
    "llm_url": "http://config-host/llm",
    "classifier_url": "http://config-host/classify"
  })");

  setenv("EMOSTOCK_LLM_URL", "http://env-host/llm", 1);
  setenv("EMOSTOCK_CLASSIFIER_URL", "http://env-host/classify", 1);
  setenv("EMOSTOCK_API_KEY", "env-key", 1);
  auto c = load_experiment_config(path);
  unsetenv("EMOSTOCK_LLM_URL");
  unsetenv("EMOSTOCK_CLASSIFIER_URL");
  unsetenv("EMOSTOCK_API_KEY");

  CHECK(c.llm_http.url == "http://env-host/llm");
  CHECK(c.classifier_http.url == "http://env-host/classify");
  CHECK(c.llm_http.api_key == "env-key");
  CHECK(c.classifier_http.api_key == "env-key");

  auto plain = load_experiment_config(path);
  CHECK(plain.llm_http.url == "http://config-host/llm");
  CHECK(plain.llm_http.api_key.empty());
}

TEST_CASE("backend construction honours the config") {
  ExperimentConfig config;
  auto stub = make_backends(config);
  CHECK(stub.llm->id() == "stub");
  CHECK(stub.classifier->id() == "stub");
  CHECK(stub.cache == nullptr);

  config.llm_backend = "replay";
  CHECK(code_of([&] { make_backends(config); }) == ErrorCode::bad_config);

  config.llm_backend = "http";
  CHECK(code_of([&] { make_backends(config); }) == ErrorCode::bad_config);
  config.llm_http.url = "http://127.0.0.1:1/llm";
  auto http = make_backends(config);
  CHECK(http.llm->id() == "http:http://127.0.0.1:1/llm");

  config.llm_backend = "stub";
  config.classifier_backend = "replay";
  CHECK(code_of([&] { make_backends(config); }) == ErrorCode::bad_config);
}

namespace {

SuiteReport crafted_suite() {
  SuiteReport suite;
  suite.config.tickers = {"TSLA"};
  suite.config.modes = {"baseline", "m2"};
  suite.config.llama_enhanced = true;
  suite.config.repetitions = 2;

  ExperimentReport base;
  base.ticker = "TSLA";
  base.mode = "baseline";
  base.enhanced = false;
  base.mean.si_accuracy = 0.25;
  base.mean.sd_accuracy = 0.25;
  base.mean.stable_accuracy = 0.5;
  base.mean.avg_si_sd = 0.25;
  base.distribution = {10, 4, 5};

  ExperimentReport m2;
  m2.ticker = "TSLA";
  m2.mode = "m2";
  m2.enhanced = true;
  m2.mean.si_accuracy = 1.0;
  m2.mean.sd_accuracy = 0.5;
  m2.mean.stable_accuracy = 0.25;
  m2.mean.avg_si_sd = 0.75;
  m2.distribution = {10, 4, 5};
  m2.filter_stats.per_ticker["TSLA"] = {100, 60, 40, 0};

  suite.experiments = {base, m2};

  SignificanceRow row;
  row.ticker = "TSLA";
  row.mode = "m2";
  row.enhanced = true;
  row.welch.t = 12.5;
  row.welch.dof = 1.875;
  row.welch.p = 0.001234;
  suite.significance = {row};
  return suite;
}

}  // namespace

TEST_CASE("markdown report structure") {
  std::string md = render_markdown(crafted_suite());

  CHECK(md.find("# Movement Prediction Report") == 0);
  CHECK(md.find("## Configuration") != std::string::npos);
  CHECK(md.find("- tickers: TSLA") != std::string::npos);
  CHECK(md.find("- modes: baseline, m2") != std::string::npos);
  CHECK(md.find("- repetitions: 2 (seeds 1..2)") != std::string::npos);
  CHECK(md.find("## TSLA") != std::string::npos);
  CHECK(md.find("| Method | S-I | S-D | Stable | Average S-I & S-D |") !=
        std::string::npos);
  CHECK(md.find("| Baseline | 25.0% | 25.0% | 50.0% | 25.0% |") != std::string::npos);
  CHECK(md.find("| Intensity Lexicon (filtered) | 100.0% | 50.0% | 25.0% | 75.0% |") !=
        std::string::npos);
  CHECK(md.find("## Average") != std::string::npos);
  CHECK(md.find("## Significance") != std::string::npos);
  CHECK(md.find("| TSLA | Intensity Lexicon (filtered) | 12.5 | 1.875 | 0.001234 |") !=
        std::string::npos);
}

TEST_CASE("csv report is exact") {
  auto suite = crafted_suite();
  suite.experiments.erase(suite.experiments.begin());  // keep the m2 row only
  CHECK(render_csv(suite) ==
        "ticker,method,enhanced,metric,value\n"
        "TSLA,m2,true,si_accuracy,1\n"
        "TSLA,m2,true,sd_accuracy,0.5\n"
        "TSLA,m2,true,stable_accuracy,0.25\n"
        "TSLA,m2,true,avg_si_sd,0.75\n");

  CHECK(render_distribution_csv(suite) ==
        "ticker,stable_count,increase_count,decrease_count\n"
        "TSLA,10,4,5\n");

  CHECK(render_filter_stats_csv(suite) ==
        "ticker,before,after,no_emotion_count,unparseable_count\n"
        "TSLA,100,60,40,0\n");
}

TEST_CASE("write_reports emits the requested format plus the side tables") {
  auto dir = std::filesystem::temp_directory_path() / "emostock_report_test";
  std::filesystem::remove_all(dir);

  auto suite = crafted_suite();
  write_reports(suite, dir, "md");
  CHECK(std::filesystem::exists(dir / "report.md"));
  CHECK(std::filesystem::exists(dir / "class_distribution.csv"));
  CHECK(std::filesystem::exists(dir / "filter_stats.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "report.csv"));

  write_reports(suite, dir, "csv");
  CHECK(std::filesystem::exists(dir / "report.csv"));

  CHECK(code_of([&] { write_reports(suite, dir, "pdf"); }) == ErrorCode::bad_config);
  std::filesystem::remove_all(dir);
}

TEST_CASE("suite on the bundled fixture is deterministic end to end") {
  auto config = load_experiment_config(
      EMOSTOCK_SOURCE_DIR "/data/fixtures/synthetic/experiment.json");
  // shrink training so this stays a unit test; full-strength runs live in the
  // acceptance binary
  config.repetitions = 2;
  config.model.hidden_units = 8;
  config.model.epochs = 3;

  auto suite = run_suite(config);
  REQUIRE(suite.experiments.size() == 2);  // baseline + m2 on one ticker
  CHECK(suite.config.modes == config.modes);

  const auto& base = suite.experiments[0];
  CHECK(base.ticker == "SYNTH");
  CHECK(base.mode == "baseline");
  CHECK_FALSE(base.enhanced);
  CHECK(base.runs.size() == 2);
  CHECK(base.filter_stats.per_ticker.empty());  // no LLM pass on price-only rows

  const auto& m2 = suite.experiments[1];
  CHECK(m2.mode == "m2");
  CHECK(m2.enhanced);
  CHECK(m2.sigma_value > 0.0);
  REQUIRE(m2.filter_stats.per_ticker.count("SYNTH") == 1);
  const auto& counts = m2.filter_stats.per_ticker.at("SYNTH");
  CHECK(counts.before == 1000);
  CHECK(counts.after == 600);   // the decoy tweets carry no emotion keywords
  CHECK(counts.no_emotion == 400);
  CHECK(counts.unparseable == 0);

  const auto& d = m2.distribution;
  CHECK(d.stable + d.increase + d.decrease == 199);  // one label per change
  CHECK(d.stable > d.increase);
  CHECK(d.stable > d.decrease);

  // per-ticker and pooled rows against the baseline
  REQUIRE(suite.significance.size() == 2);
  CHECK(suite.significance[0].ticker == "SYNTH");
  CHECK(suite.significance[0].mode == "m2");
  CHECK(suite.significance[1].ticker == "pooled");

  auto again = run_suite(config);
  CHECK(render_markdown(suite) == render_markdown(again));
  CHECK(render_csv(suite) == render_csv(again));
}
