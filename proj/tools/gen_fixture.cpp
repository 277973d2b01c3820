// Regenerates the bundled synthetic corpus under data/fixtures/synthetic.
// The planted structure: each trading day's tweets name the direction of the
// NEXT day's close, so emotion-aware feature sets can separate the classes
// while price history alone carries no signal.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "emostock/csv.hpp"
#include "emostock/date.hpp"
#include "emostock/rng.hpp"

namespace {

using emostock::Date;
using emostock::SplitMix64;

constexpr int kTradingDays = 200;

enum class Move { stable, up, down };

struct SignalWord {
  const char* word;
  const char* tweet;  // exactly one lexicon word, no stub keyword collisions
};

const SignalWord kUpWords[] = {
    {"surge", "Expecting a big surge in SYNTH tomorrow"},
    {"rally", "SYNTH primed for a rally, buyers lining up"},
    {"moon", "SYNTH is going to the moon"},
};
const SignalWord kDownWords[] = {
    {"plunge", "Brace for a plunge in SYNTH"},
    {"crash", "SYNTH chart says a crash is coming"},
    {"dump", "Whales getting ready to dump SYNTH"},
};
const SignalWord kStableWords[] = {
    {"steady", "SYNTH holding steady this week"},
    {"calm", "Order flow in SYNTH looks calm"},
    {"flat", "SYNTH should stay flat for a while"},
};

const char* kDecoys[] = {
    "SYNTH quarterly report is scheduled for next week",
    "Annual shareholder letter for SYNTH was published",
    "SYNTH opens a new office in Austin",
    "Conference call transcript for SYNTH now available",
};

double round6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return std::stod(buf);
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(1);
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2 || (argc == 2 && argv[1][0] == '-')) {
    std::cerr << "usage: gen_fixture [out_dir]\n"
              << "regenerates the synthetic corpus (default: data/fixtures/synthetic)\n";
    return argc == 2 && std::string(argv[1]) == "--help" ? 0 : 2;
  }
  std::filesystem::path out_dir =
      argc > 1 ? argv[1] : "data/fixtures/synthetic";
  std::filesystem::create_directories(out_dir);

  SplitMix64 rng(20210104);

  std::vector<Date> days;
  Date d = *Date::parse("2021-01-04");
  while (static_cast<int>(days.size()) < kTradingDays) {
    if (!d.is_weekend()) days.push_back(d);
    d = d.next_day();
  }

  // Moves for day i-1 -> day i. moves[0] is unused padding so indexes align
  // with days; the final day also gets one so its tweets have a direction.
  std::vector<Move> moves(days.size() + 1, Move::stable);
  std::vector<double> closes = {100.0};
  for (std::size_t i = 1; i < days.size(); ++i) {
    const double u = rng.next_double();
    Move m = u < 0.6 ? Move::stable : (u < 0.8 ? Move::up : Move::down);
    double pc = 0.0;
    if (m == Move::stable) {
      pc = rng.next_double(0.1, 0.6);
      if (rng.next_double() < 0.5) pc = -pc;
    } else if (m == Move::up) {
      pc = rng.next_double(2.6, 3.4);
    } else {
      pc = -rng.next_double(2.6, 3.4);
    }
    moves[i] = m;
    closes.push_back(round6(closes.back() * (1.0 + pc / 100.0)));
  }
  moves[days.size()] = Move::stable;

  std::ostringstream prices;
  prices << "Date,Open,High,Low,Close,Adj Close,Volume\n";
  for (std::size_t i = 0; i < days.size(); ++i) {
    const double close = closes[i];
    const double open = i == 0 ? close : closes[i - 1];
    const double hi = round6(std::max(open, close) * (1.0 + rng.next_double(0.001, 0.004)));
    const double lo = round6(std::min(open, close) * (1.0 - rng.next_double(0.001, 0.004)));
    const auto volume = 1000000 + rng.next_below(4000000);
    const std::string row[] = {days[i].iso(),  fmt6(open),  fmt6(hi),
                               fmt6(lo),       fmt6(close), fmt6(close),
                               std::to_string(volume)};
    emostock::csv::write_row(prices, row);
  }
  write_file(out_dir / "prices.csv", prices.str());

  std::ostringstream tweets;
  tweets << "date,ticker,company,text\n";
  auto emit = [&](const Date& day, const char* text) {
    const std::string row[] = {day.iso(), "SYNTH", "Synthetic Corp", text};
    emostock::csv::write_row(tweets, row);
  };
  for (std::size_t i = 0; i < days.size(); ++i) {
    const Move next = moves[i + 1];
    const SignalWord* words = next == Move::up     ? kUpWords
                              : next == Move::down ? kDownWords
                                                   : kStableWords;
    for (int k = 0; k < 3; ++k) emit(days[i], words[k].tweet);
    emit(days[i], kDecoys[i % 4]);
    emit(days[i], kDecoys[(i + 1) % 4]);
  }
  write_file(out_dir / "tweets.csv", tweets.str());

  write_file(out_dir / "lexicon_intensity.txt",
             "surge\tjoy\t0.9\n"
             "surge\tanticipation\t0.7\n"
             "rally\tjoy\t0.8\n"
             "rally\ttrust\t0.6\n"
             "moon\tjoy\t0.95\n"
             "moon\tsurprise\t0.5\n"
             "plunge\tfear\t0.9\n"
             "plunge\tsadness\t0.8\n"
             "crash\tfear\t0.95\n"
             "crash\tsadness\t0.85\n"
             "dump\tanger\t0.7\n"
             "dump\tdisgust\t0.6\n"
             "steady\ttrust\t0.8\n"
             "calm\ttrust\t0.7\n"
             "calm\tjoy\t0.3\n"
             "flat\tanticipation\t0.2\n");

  write_file(out_dir / "lexicon_binary.txt",
             "surge\tjoy\t1\n"
             "surge\tanticipation\t1\n"
             "surge\tpositive\t1\n"
             "rally\tjoy\t1\n"
             "rally\ttrust\t1\n"
             "rally\tpositive\t1\n"
             "moon\tjoy\t1\n"
             "moon\tsurprise\t1\n"
             "moon\tpositive\t1\n"
             "plunge\tfear\t1\n"
             "plunge\tsadness\t1\n"
             "plunge\tnegative\t1\n"
             "crash\tfear\t1\n"
             "crash\tsadness\t1\n"
             "crash\tnegative\t1\n"
             "dump\tanger\t1\n"
             "dump\tdisgust\t1\n"
             "dump\tnegative\t1\n"
             "steady\ttrust\t1\n"
             "steady\tpositive\t1\n"
             "calm\ttrust\t1\n"
             "calm\tjoy\t1\n"
             "calm\tpositive\t1\n"
             "flat\tanticipation\t1\n");

  write_file(out_dir / "stub_rules.json",
             "{\n"
             "  \"rules\": [\n"
             "    {\"contains\": \"Feeling uneasy about tomorrow's Fed meeting\",\n"
             "     \"response\": \"anxiety, fear, caution\"},\n"
             "    {\"contains\": \"MSFT Q2 report is scheduled\",\n"
             "     \"response\": \"no emotion\"}\n"
             "  ],\n"
             "  \"keyword_fallback\": true\n"
             "}\n");

  write_file(out_dir / "experiment.json",
             "{\n"
             "  \"tickers\": [\"SYNTH\"],\n"
             "  \"modes\": [\"baseline\", \"m2\"],\n"
             "  \"llama_enhanced\": true,\n"
             "  \"repetitions\": 10,\n"
             "  \"base_seed\": 1,\n"
             "  \"llm_backend\": \"stub\",\n"
             "  \"classifier_backend\": \"stub\",\n"
             "  \"analyze\": \"text\",\n"
             "  \"sigma_scope\": \"full\",\n"
             "  \"non_trading\": \"roll_forward\",\n"
             "  \"save_checkpoints\": \"none\",\n"
             "  \"model\": {\n"
             "    \"hidden_units\": 64,\n"
             "    \"num_layers\": 2,\n"
             "    \"dropout_rate\": 0.2,\n"
             "    \"learning_rate\": 0.01,\n"
             "    \"epochs\": 80,\n"
             "    \"batch_size\": 32,\n"
             "    \"window\": 1\n"
             "  },\n"
             "  \"paths\": {\n"
             "    \"tweets\": \"tweets.csv\",\n"
             "    \"prices\": \"prices.csv\",\n"
             "    \"intensity_lexicon\": \"lexicon_intensity.txt\",\n"
             "    \"binary_lexicon\": \"lexicon_binary.txt\",\n"
             "    \"stopwords\": \"../../stopwords_english.txt\",\n"
             "    \"stub_rules\": \"stub_rules.json\"\n"
             "  }\n"
             "}\n");

  std::cout << "wrote fixture to " << out_dir.string() << "\n";
  return 0;
}
