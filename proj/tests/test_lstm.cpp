#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "emostock/errors.hpp"
#include "emostock/lstm.hpp"
#include "emostock/rng.hpp"

using namespace emostock;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::network;  // sentinel: never thrown by this module
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.input_dim = 3;
  c.hidden_units = 4;
  c.num_layers = 2;
  c.dropout_rate = 0.0;
  c.num_classes = 3;
  c.window = 2;
  c.batch_size = 4;
  c.seed = 7;
  return c;
}

std::vector<Matd> random_steps(int time_steps, int dim, int batch, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Matd> steps(static_cast<std::size_t>(time_steps));
  for (auto& step : steps) {
    step.resize(dim, batch);
    fill_uniform(step, -1.0, 1.0, rng);
  }
  return steps;
}

}  // namespace

TEST_CASE("model config validation") {
  validate(ModelConfig{});  // defaults are acceptable
  auto expect_bad = [](const std::function<void(ModelConfig&)>& tweak) {
    ModelConfig c;
    tweak(c);
    CHECK(code_of([&] { validate(c); }) == ErrorCode::bad_config);
  };
  expect_bad([](ModelConfig& c) { c.input_dim = 0; });
  expect_bad([](ModelConfig& c) { c.hidden_units = 0; });
  expect_bad([](ModelConfig& c) { c.num_layers = 0; });
  expect_bad([](ModelConfig& c) { c.dropout_rate = 1.0; });
  expect_bad([](ModelConfig& c) { c.dropout_rate = -0.1; });
  expect_bad([](ModelConfig& c) { c.num_classes = 1; });
  expect_bad([](ModelConfig& c) { c.learning_rate = 0.0; });
  expect_bad([](ModelConfig& c) { c.learning_rate = std::numeric_limits<double>::infinity(); });
  expect_bad([](ModelConfig& c) { c.epochs = -1; });
  expect_bad([](ModelConfig& c) { c.batch_size = 0; });
  expect_bad([](ModelConfig& c) { c.window = 0; });
}

TEST_CASE("parameter initialization shapes, bounds and forget bias") {
  auto config = tiny_config();
  auto params = init_params(config);

  REQUIRE(params.layers.size() == 2);
  CHECK(params.layers[0].w_in.rows() == 16);
  CHECK(params.layers[0].w_in.cols() == 3);
  CHECK(params.layers[0].w_rec.rows() == 16);
  CHECK(params.layers[0].w_rec.cols() == 4);
  CHECK(params.layers[0].bias.rows() == 16);
  CHECK(params.layers[0].bias.cols() == 1);
  CHECK(params.layers[1].w_in.cols() == 4);  // second layer consumes hidden states
  CHECK(params.head_w.rows() == 3);
  CHECK(params.head_w.cols() == 4);
  CHECK(params.head_b.rows() == 3);

  const double scale = 1.0 / std::sqrt(4.0);
  for (const auto& layer : params.layers) {
    CHECK(layer.w_in.cwiseAbs().maxCoeff() < scale);
    CHECK(layer.w_rec.cwiseAbs().maxCoeff() < scale);
  }
  CHECK(params.head_w.cwiseAbs().maxCoeff() < scale);
  CHECK(params.head_b.isZero(0.0));

  // bias rows: input gate zero, forget gate one, cell and output zero
  for (const auto& layer : params.layers) {
    CHECK(layer.bias.topRows(4).isZero(0.0));
    CHECK(layer.bias.middleRows(4, 4).isOnes(0.0));
    CHECK(layer.bias.bottomRows(8).isZero(0.0));
  }

  auto again = init_params(config);
  CHECK(params.layers[0].w_in == again.layers[0].w_in);
  CHECK(params.head_w == again.head_w);

  config.seed = 8;
  auto other = init_params(config);
  CHECK(params.layers[0].w_in != other.layers[0].w_in);

  // tensor ordering: per layer in/rec/bias, then the head
  auto tensors = params.tensors();
  REQUIRE(tensors.size() == 2 * 3 + 2);
  CHECK(tensors[0] == &params.layers[0].w_in);
  CHECK(tensors[5] == &params.layers[1].bias);
  CHECK(tensors[6] == &params.head_w);
  CHECK(tensors[7] == &params.head_b);
}

TEST_CASE("dropout masks") {
  CHECK(dropout_mask(5, 7, 0.0, 99) == Matd::Ones(5, 7));

  const double rate = 0.25;
  Matd mask = dropout_mask(100, 100, rate, 321);
  const double keep_scale = 1.0 / (1.0 - rate);
  std::size_t zeros = 0;
  for (Eigen::Index j = 0; j < mask.cols(); ++j)
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      if (mask(i, j) == 0.0)
        ++zeros;
      else
        CHECK(mask(i, j) == keep_scale);
    }
  double drop_fraction = static_cast<double>(zeros) / 10000.0;
  CHECK(drop_fraction > rate - 0.02);
  CHECK(drop_fraction < rate + 0.02);

  // inverted scaling keeps the expected activation level
  CHECK(mask.mean() == doctest::Approx(1.0).epsilon(0.02));

  CHECK(dropout_mask(100, 100, rate, 321) == mask);
  CHECK(dropout_mask(100, 100, rate, 322) != mask);

  CHECK(code_of([] { dropout_mask(2, 2, 1.0, 0); }) == ErrorCode::bad_config);
  CHECK(code_of([] { dropout_mask(2, 2, -0.5, 0); }) == ErrorCode::bad_config);
}

TEST_CASE("forward produces column-stochastic probabilities") {
  auto config = tiny_config();
  auto params = init_params(config);
  auto steps = random_steps(config.window, config.input_dim, 5, 11);

  Matd probs = forward(params, config, steps, RunMode::eval, 0);
  REQUIRE(probs.rows() == 3);
  REQUIRE(probs.cols() == 5);
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    CHECK(probs.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
      CHECK(probs(i, j) > 0.0);
      CHECK(probs(i, j) < 1.0);
    }
  }

  // with dropout off, train and eval agree
  Matd trained = forward(params, config, steps, RunMode::train, 123);
  CHECK((probs - trained).cwiseAbs().maxCoeff() == 0.0);

  // and with dropout on, a fixed seed replays the exact pass
  config.dropout_rate = 0.3;
  Matd drop_a = forward(params, config, steps, RunMode::train, 5);
  Matd drop_b = forward(params, config, steps, RunMode::train, 5);
  CHECK((drop_a - drop_b).cwiseAbs().maxCoeff() == 0.0);
  Matd drop_c = forward(params, config, steps, RunMode::train, 6);
  CHECK((drop_a - drop_c).cwiseAbs().maxCoeff() > 0.0);
  // eval mode ignores dropout entirely
  Matd eval_drop = forward(params, config, steps, RunMode::eval, 5);
  CHECK((probs - eval_drop).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward validates shapes") {
  auto config = tiny_config();
  auto params = init_params(config);

  CHECK(code_of([&] { forward(params, config, {}, RunMode::eval, 0); }) ==
        ErrorCode::shape_mismatch);
  CHECK(code_of([&] {
          auto steps = random_steps(2, 4, 3, 1);  // wrong input_dim
          forward(params, config, steps, RunMode::eval, 0);
        }) == ErrorCode::shape_mismatch);
  CHECK(code_of([&] {
          auto steps = random_steps(2, 3, 3, 1);
          steps[1](0, 0) = std::nan("");
          forward(params, config, steps, RunMode::eval, 0);
        }) == ErrorCode::non_finite_input);
  CHECK(code_of([&] {
          ModelConfig wrong = config;
          wrong.hidden_units = 5;
          auto steps = random_steps(2, 3, 3, 1);
          forward(params, wrong, steps, RunMode::eval, 0);
        }) == ErrorCode::shape_mismatch);
}

TEST_CASE("cross entropy matches the hand computation") {
  Matd probs(2, 2);
  probs << 0.25, 0.5,
           0.75, 0.5;
  double expected = -(std::log(0.75) + std::log(0.5)) / 2.0;
  CHECK(cross_entropy(probs, {1, 0}) == doctest::Approx(expected).epsilon(1e-15));

  CHECK(code_of([&] { cross_entropy(probs, {1}); }) == ErrorCode::length_mismatch);
  CHECK(code_of([&] { cross_entropy(probs, {1, 2}); }) == ErrorCode::bad_row);
  CHECK(code_of([&] { cross_entropy(probs, {1, -1}); }) == ErrorCode::bad_row);
}

namespace {

double loss_at(const LstmParams& params, const ModelConfig& config,
               const std::vector<Matd>& steps, const std::vector<int>& labels,
               std::uint64_t dropout_seed) {
  Matd probs = forward(params, config, steps, RunMode::train, dropout_seed);
  return cross_entropy(probs, labels);
}

// Central finite differences over every coordinate of every tensor. Dropout
// masks depend only on (seed, layer, timestep), so perturbing a weight replays
// the identical masks and the difference quotient stays meaningful.
double max_gradient_error(const ModelConfig& config, std::uint64_t data_seed,
                          std::uint64_t dropout_seed) {
  auto params = init_params(config);
  auto steps = random_steps(config.window, config.input_dim, config.batch_size, data_seed);
  std::vector<int> labels(static_cast<std::size_t>(config.batch_size));
  SplitMix64 rng(data_seed ^ 0xabcdef);
  for (auto& label : labels)
    label = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.num_classes)));

  ForwardCache cache;
  Matd probs = forward(params, config, steps, RunMode::train, dropout_seed, &cache);
  Gradients grads = backward(params, config, cache, probs, labels);

  const double h = 1e-5;
  double worst = 0.0;
  auto tensors = params.tensors();
  auto grad_tensors = grads.tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    Matd& tensor = *tensors[k];
    const Matd& grad = *grad_tensors[k];
    for (Eigen::Index j = 0; j < tensor.cols(); ++j)
      for (Eigen::Index i = 0; i < tensor.rows(); ++i) {
        const double saved = tensor(i, j);
        tensor(i, j) = saved + h;
        const double plus = loss_at(params, config, steps, labels, dropout_seed);
        tensor(i, j) = saved - h;
        const double minus = loss_at(params, config, steps, labels, dropout_seed);
        tensor(i, j) = saved;
        const double fd = (plus - minus) / (2.0 * h);
        const double analytic = grad(i, j);
        const double err =
            std::abs(analytic - fd) / std::max(1e-4, std::abs(analytic) + std::abs(fd));
        worst = std::max(worst, err);
      }
  }
  return worst;
}

}  // namespace

TEST_CASE("analytic gradients agree with finite differences") {
  auto config = tiny_config();
  CHECK(max_gradient_error(config, 101, 0) < 1e-5);

  config.dropout_rate = 0.25;
  CHECK(max_gradient_error(config, 202, 17) < 1e-5);

  config.dropout_rate = 0.0;
  config.window = 1;
  config.num_layers = 1;
  CHECK(max_gradient_error(config, 303, 0) < 1e-5);
}

TEST_CASE("duplicating every batch column leaves the mean gradient unchanged") {
  auto config = tiny_config();
  auto params = init_params(config);
  auto steps = random_steps(config.window, config.input_dim, 3, 55);
  std::vector<int> labels = {0, 2, 1};

  std::vector<Matd> doubled(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    doubled[t].resize(config.input_dim, 6);
    doubled[t] << steps[t], steps[t];
  }
  std::vector<int> doubled_labels = {0, 2, 1, 0, 2, 1};

  ForwardCache cache_a, cache_b;
  Matd probs_a = forward(params, config, steps, RunMode::train, 0, &cache_a);
  Matd probs_b = forward(params, config, doubled, RunMode::train, 0, &cache_b);
  Gradients grads_a = backward(params, config, cache_a, probs_a, labels);
  Gradients grads_b = backward(params, config, cache_b, probs_b, doubled_labels);

  auto ta = grads_a.tensors();
  auto tb = grads_b.tensors();
  for (std::size_t k = 0; k < ta.size(); ++k)
    CHECK((*ta[k] - *tb[k]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("backward rejects a cache that does not match") {
  auto config = tiny_config();
  auto params = init_params(config);
  auto steps = random_steps(config.window, config.input_dim, 3, 55);
  ForwardCache cache;
  Matd probs = forward(params, config, steps, RunMode::train, 0, &cache);

  CHECK(code_of([&] { backward(params, config, cache, probs, {0, 1}); }) ==
        ErrorCode::stale_cache);
  CHECK(code_of([&] {
          Matd wrong(3, 4);
          wrong.setZero();
          backward(params, config, cache, wrong, {0, 1, 2, 0});
        }) == ErrorCode::stale_cache);
  CHECK(code_of([&] { backward(params, config, cache, probs, {0, 1, 9}); }) ==
        ErrorCode::bad_row);
}

TEST_CASE("adam steps shrink a quadratic") {
  // single 1x1 "layer-free" setup: drive the head bias toward the minimum of
  // f(b) = (b - 3)^2 using its analytic gradient
  ModelConfig config = tiny_config();
  config.num_layers = 1;
  auto params = init_params(config);
  auto state = make_adam_state(params);

  for (int iter = 0; iter < 4000; ++iter) {
    Gradients grads;
    grads.layers.resize(1);
    grads.layers[0].w_in = Matd::Zero(16, 3);
    grads.layers[0].w_rec = Matd::Zero(16, 4);
    grads.layers[0].bias = Matd::Zero(16, 1);
    grads.head_w = Matd::Zero(3, 4);
    grads.head_b = Matd::Zero(3, 1);
    grads.head_b(0, 0) = 2.0 * (params.head_b(0, 0) - 3.0);
    adam_step(params, grads, state, 0.01);
  }
  CHECK(params.head_b(0, 0) == doctest::Approx(3.0).epsilon(0.01));
  CHECK(state.step == 4000);

  CHECK(code_of([&] {
          Gradients wrong;
          wrong.layers.resize(1);
          wrong.layers[0].w_in = Matd::Zero(2, 2);
          wrong.layers[0].w_rec = Matd::Zero(2, 2);
          wrong.layers[0].bias = Matd::Zero(2, 1);
          wrong.head_w = Matd::Zero(3, 4);
          wrong.head_b = Matd::Zero(3, 1);
          adam_step(params, wrong, state, 0.01);
        }) == ErrorCode::shape_mismatch);
}

namespace {

// 30 scaled rows whose single feature pins down the next-day label
SplitDataset separable_split() {
  SplitDataset split;
  split.train.feature_names = {"signal", "noise"};
  Date d = *Date::parse("2021-01-04");
  SplitMix64 rng(13);
  for (int i = 0; i < 30; ++i) {
    while (d.is_weekend()) d = d.next_day();
    FeatureRow row;
    row.date = d;
    int cls = i % 3;
    row.features = Eigen::VectorXd(2);
    row.features << static_cast<double>(cls) / 2.0, rng.next_double();
    row.label = static_cast<MovementLabel>(cls);
    split.train.rows.push_back(std::move(row));
    d = d.next_day();
  }
  split.test.feature_names = split.train.feature_names;
  return split;
}

}  // namespace

TEST_CASE("training fits a separable toy dataset") {
  auto split = separable_split();
  ModelConfig config;
  config.input_dim = 2;
  config.hidden_units = 8;
  config.num_layers = 1;
  config.dropout_rate = 0.0;
  config.epochs = 80;
  config.batch_size = 8;
  config.window = 1;
  config.seed = 3;

  auto result = train(split, config);
  REQUIRE(result.loss_trace.size() == 80);
  CHECK(result.loss_trace.back() < 0.1);
  CHECK(result.loss_trace.back() < result.loss_trace.front());

  auto predictions = predict(result.params, config, split.train);
  REQUIRE(predictions.size() == 30);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == static_cast<int>(split.train.rows[i].label)) ++correct;
  CHECK(correct == 30);

  // the whole path is a function of the seed
  auto replay = train(split, config);
  auto ta = result.params.tensors();
  auto tb = replay.params.tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) CHECK(*ta[k] == *tb[k]);
  CHECK(result.loss_trace == replay.loss_trace);
}

TEST_CASE("train validates the row shape") {
  auto split = separable_split();
  ModelConfig config;
  config.input_dim = 5;  // rows carry 2 features
  config.window = 1;
  CHECK(code_of([&] { train(split, config); }) == ErrorCode::shape_mismatch);

  ModelConfig widewin;
  widewin.input_dim = 2;
  widewin.window = 40;  // more than the row count
  CHECK(code_of([&] { train(split, widewin); }) == ErrorCode::too_few_rows);
}

TEST_CASE("prediction windows and deterministic tie-breaks") {
  auto split = separable_split();
  ModelConfig config;
  config.input_dim = 2;
  config.hidden_units = 4;
  config.num_layers = 1;
  config.window = 3;
  config.seed = 5;
  auto params = init_params(config);

  auto predictions = predict(params, config, split.train);
  CHECK(predictions.size() == 30 - 3 + 1);  // one per anchor row

  // zero head: every class ties, the lowest index wins
  params.head_w.setZero();
  params.head_b.setZero();
  for (int p : predict(params, config, split.train)) CHECK(p == 0);

  CHECK(code_of([&] {
          FeatureTable two;
          two.feature_names = split.train.feature_names;
          two.rows.assign(split.train.rows.begin(), split.train.rows.begin() + 2);
          predict(params, config, two);
        }) == ErrorCode::too_few_rows);
}

TEST_CASE("class indices map onto movement labels") {
  auto labels = to_labels({0, 2, 1});
  CHECK(labels == std::vector<MovementLabel>{MovementLabel::stable,
                                             MovementLabel::significant_decrease,
                                             MovementLabel::significant_increase});
  CHECK(code_of([] { to_labels({3}); }) == ErrorCode::bad_row);
  CHECK(code_of([] { to_labels({-1}); }) == ErrorCode::bad_row);
}

TEST_CASE("checkpoints round-trip bitwise") {
  auto config = tiny_config();
  auto params = init_params(config);
  params.layers[0].w_in(0, 0) = 0.1;
  params.layers[0].w_in(1, 0) = 1.0 / 3.0;
  params.layers[1].w_rec(2, 3) = 1e-300;
  params.head_b(1, 0) = -0.0;

  auto dir = std::filesystem::temp_directory_path() / "emostock_ckpt_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "model.json";
  save_checkpoint(path, params, config);

  auto [loaded, loaded_config] = load_checkpoint(path);
  CHECK(loaded_config.input_dim == config.input_dim);
  CHECK(loaded_config.hidden_units == config.hidden_units);
  CHECK(loaded_config.num_layers == config.num_layers);
  CHECK(loaded_config.dropout_rate == config.dropout_rate);
  CHECK(loaded_config.window == config.window);
  CHECK(loaded_config.seed == config.seed);

  auto ta = params.tensors();
  auto tb = loaded.tensors();
  REQUIRE(ta.size() == tb.size());
  for (std::size_t k = 0; k < ta.size(); ++k) {
    REQUIRE(ta[k]->rows() == tb[k]->rows());
    REQUIRE(ta[k]->cols() == tb[k]->cols());
    for (Eigen::Index j = 0; j < ta[k]->cols(); ++j)
      for (Eigen::Index i = 0; i < ta[k]->rows(); ++i)
        CHECK((*ta[k])(i, j) == (*tb[k])(i, j));
  }

  // saving the loaded params again reproduces the identical file
  auto path2 = dir / "model2.json";
  save_checkpoint(path2, loaded, loaded_config);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::string text_a((std::istreambuf_iterator<char>(a)), {});
  std::string text_b((std::istreambuf_iterator<char>(b)), {});
  CHECK(text_a == text_b);

  std::filesystem::remove_all(dir);
}

TEST_CASE("checkpoint loading rejects damaged files") {
  auto dir = std::filesystem::temp_directory_path() / "emostock_ckpt_bad";
  std::filesystem::create_directories(dir);

  auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    out << body;
    return dir / name;
  };

  CHECK(code_of([&] { load_checkpoint(dir / "missing.json"); }) == ErrorCode::bad_config);
  CHECK(code_of([&] { load_checkpoint(write("garbage.json", "{not json")); }) ==
        ErrorCode::bad_row);
  CHECK(code_of([&] { load_checkpoint(write("empty.json", "{}")); }) == ErrorCode::bad_row);

  // structurally valid but wrong tensor count
  CHECK(code_of([&] {
          load_checkpoint(write("short.json",
                                R"({"config": {"input_dim": 2, "hidden_units": 2,
                                    "num_layers": 1, "num_classes": 3},
                                    "tensors": []})"));
        }) == ErrorCode::shape_mismatch);

  std::filesystem::remove_all(dir);
}
