#include "emostock/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "emostock/errors.hpp"
#include "emostock/rng.hpp"

namespace emostock {
namespace {

using nlohmann::json;

Eigen::Index gate_rows(const ModelConfig& config) {
  return static_cast<Eigen::Index>(4) * config.hidden_units;
}

void check_params_shape(const LstmParams& params, const ModelConfig& config) {
  const auto h = static_cast<Eigen::Index>(config.hidden_units);
  if (params.layers.size() != static_cast<std::size_t>(config.num_layers))
    throw data_error(ErrorCode::shape_mismatch, "layer count does not match the config");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto in = l == 0 ? static_cast<Eigen::Index>(config.input_dim) : h;
    const auto& layer = params.layers[l];
    if (layer.w_in.rows() != 4 * h || layer.w_in.cols() != in ||
        layer.w_rec.rows() != 4 * h || layer.w_rec.cols() != h ||
        layer.bias.rows() != 4 * h || layer.bias.cols() != 1)
      throw data_error(ErrorCode::shape_mismatch,
                       "layer " + std::to_string(l) + " tensors have unexpected shapes");
  }
  if (params.head_w.rows() != config.num_classes || params.head_w.cols() != h ||
      params.head_b.rows() != config.num_classes || params.head_b.cols() != 1)
    throw data_error(ErrorCode::shape_mismatch, "output head tensors have unexpected shapes");
}

}  // namespace

void validate(const ModelConfig& config) {
  auto bad = [](const std::string& what) {
    throw config_error(ErrorCode::bad_config, what);
  };
  if (config.input_dim < 1) bad("input_dim must be >= 1");
  if (config.hidden_units < 1) bad("hidden_units must be >= 1");
  if (config.num_layers < 1) bad("num_layers must be >= 1");
  if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0))
    bad("dropout_rate must be in [0, 1)");
  if (config.num_classes < 2) bad("num_classes must be >= 2");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate))
    bad("learning_rate must be positive and finite");
  if (config.epochs < 0) bad("epochs must be >= 0");
  if (config.batch_size < 1) bad("batch_size must be >= 1");
  if (config.window < 1) bad("window must be >= 1");
}

std::vector<Matd*> LstmParams::tensors() {
  std::vector<Matd*> out;
  for (auto& layer : layers) {
    out.push_back(&layer.w_in);
    out.push_back(&layer.w_rec);
    out.push_back(&layer.bias);
  }
  out.push_back(&head_w);
  out.push_back(&head_b);
  return out;
}

std::vector<const Matd*> LstmParams::tensors() const {
  std::vector<const Matd*> out;
  for (const auto& layer : layers) {
    out.push_back(&layer.w_in);
    out.push_back(&layer.w_rec);
    out.push_back(&layer.bias);
  }
  out.push_back(&head_w);
  out.push_back(&head_b);
  return out;
}

LstmParams init_params(const ModelConfig& config) {
  validate(config);
  const auto h = static_cast<Eigen::Index>(config.hidden_units);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.hidden_units));
  SplitMix64 rng(config.seed);

  LstmParams params;
  params.layers.resize(static_cast<std::size_t>(config.num_layers));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto in = l == 0 ? static_cast<Eigen::Index>(config.input_dim) : h;
    auto& layer = params.layers[l];
    layer.w_in.resize(gate_rows(config), in);
    layer.w_rec.resize(gate_rows(config), h);
    fill_uniform(layer.w_in, -scale, scale, rng);
    fill_uniform(layer.w_rec, -scale, scale, rng);
    layer.bias = Matd::Zero(gate_rows(config), 1);
    layer.bias.block(h, 0, h, 1).setOnes();  // forget gate starts open
  }
  params.head_w.resize(config.num_classes, h);
  fill_uniform(params.head_w, -scale, scale, rng);
  params.head_b = Matd::Zero(config.num_classes, 1);
  return params;
}

// ---------------------------------------------------------------------------
// Dropout

Matd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw config_error(ErrorCode::bad_config, "dropout rate must be in [0, 1)");
  if (rate == 0.0) return Matd::Ones(rows, cols);
  Matd mask(rows, cols);
  SplitMix64 rng(seed);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      mask(i, j) = rng.next_double() < rate ? 0.0 : keep_scale;
  return mask;
}

// ---------------------------------------------------------------------------
// Forward

Matd forward(const LstmParams& params, const ModelConfig& config,
             const std::vector<Matd>& steps, RunMode mode, std::uint64_t dropout_seed,
             ForwardCache* cache) {
  validate(config);
  check_params_shape(params, config);
  if (steps.empty())
    throw data_error(ErrorCode::shape_mismatch, "forward needs at least one timestep");
  const auto time_steps = static_cast<int>(steps.size());
  const auto batch = steps[0].cols();
  const auto h = static_cast<Eigen::Index>(config.hidden_units);
  if (batch < 1) throw data_error(ErrorCode::shape_mismatch, "batch must be non-empty");
  for (const auto& step : steps) {
    if (step.rows() != config.input_dim || step.cols() != batch)
      throw data_error(ErrorCode::shape_mismatch, "every timestep must be input_dim x batch");
    if (!all_finite(step))
      throw data_error(ErrorCode::non_finite_input, "input tensor has a non-finite entry");
  }

  const bool use_dropout = mode == RunMode::train && config.dropout_rate > 0.0;
  ForwardCache local;
  ForwardCache& cc = cache ? *cache : local;
  cc = ForwardCache{};
  cc.time_steps = time_steps;
  cc.batch = static_cast<int>(batch);
  cc.input_dim = config.input_dim;
  cc.hidden = config.hidden_units;
  cc.classes = config.num_classes;
  cc.train = mode == RunMode::train;
  cc.layers.resize(params.layers.size());

  const auto layer_count = params.layers.size();
  for (std::size_t l = 0; l < layer_count; ++l) {
    const auto& layer = params.layers[l];
    auto& layer_cache = cc.layers[l];
    layer_cache.resize(static_cast<std::size_t>(time_steps));
    Matd h_prev = Matd::Zero(h, batch);
    Matd c_prev = Matd::Zero(h, batch);
    for (int t = 0; t < time_steps; ++t) {
      auto& sc = layer_cache[static_cast<std::size_t>(t)];
      if (l == 0) {
        sc.x = steps[static_cast<std::size_t>(t)];
      } else {
        const auto& below = cc.layers[l - 1][static_cast<std::size_t>(t)];
        sc.x = below.mask.size() ? (below.h.array() * below.mask.array()).matrix() : below.h;
      }
      Matd z = layer.w_in * sc.x + layer.w_rec * h_prev;
      z.colwise() += layer.bias.col(0);
      sc.i = sigmoid(z.topRows(h).array()).matrix();
      sc.f = sigmoid(z.middleRows(h, h).array()).matrix();
      sc.g = z.middleRows(2 * h, h).array().tanh().matrix();
      sc.o = sigmoid(z.bottomRows(h).array()).matrix();
      sc.c = (sc.f.array() * c_prev.array() + sc.i.array() * sc.g.array()).matrix();
      sc.tanh_c = sc.c.array().tanh().matrix();
      sc.h = (sc.o.array() * sc.tanh_c.array()).matrix();
      const bool consumed = l + 1 < layer_count || t + 1 == time_steps;
      if (use_dropout && consumed)
        sc.mask = dropout_mask(h, batch, config.dropout_rate,
                               mix_seed(dropout_seed, static_cast<std::uint64_t>(l),
                                        static_cast<std::uint64_t>(t)));
      h_prev = sc.h;
      c_prev = sc.c;
    }
  }

  const auto& top = cc.layers.back().back();
  cc.head_input = top.mask.size() ? (top.h.array() * top.mask.array()).matrix() : top.h;
  Matd logits = params.head_w * cc.head_input;
  logits.colwise() += params.head_b.col(0);
  return softmax_columns(logits);
}

// ---------------------------------------------------------------------------
// Loss

double cross_entropy(const Matd& probs, const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(probs.cols()))
    throw data_error(ErrorCode::length_mismatch, "one label per batch column required");
  double total = 0.0;
  for (Eigen::Index b = 0; b < probs.cols(); ++b) {
    const int label = labels[static_cast<std::size_t>(b)];
    if (label < 0 || label >= probs.rows())
      throw data_error(ErrorCode::bad_row, "label index outside the class range");
    total -= std::log(std::max(probs(label, b), 1e-300));
  }
  return total / static_cast<double>(probs.cols());
}

// ---------------------------------------------------------------------------
// Backward

Gradients backward(const LstmParams& params, const ModelConfig& config,
                   const ForwardCache& cache, const Matd& probs,
                   const std::vector<int>& labels) {
  check_params_shape(params, config);
  const auto h = static_cast<Eigen::Index>(config.hidden_units);
  if (cache.layers.size() != params.layers.size() || cache.hidden != config.hidden_units ||
      cache.input_dim != config.input_dim || cache.classes != config.num_classes ||
      cache.time_steps < 1 || cache.layers.empty() ||
      cache.layers[0].size() != static_cast<std::size_t>(cache.time_steps))
    throw data_error(ErrorCode::stale_cache,
                     "forward cache does not match the current params and config");
  const auto batch = static_cast<Eigen::Index>(cache.batch);
  if (probs.rows() != config.num_classes || probs.cols() != batch ||
      labels.size() != static_cast<std::size_t>(batch))
    throw data_error(ErrorCode::stale_cache, "probs or labels do not match the cached batch");
  const auto time_steps = cache.time_steps;

  Gradients grads;
  grads.layers.resize(params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    grads.layers[l].w_in = Matd::Zero(params.layers[l].w_in.rows(), params.layers[l].w_in.cols());
    grads.layers[l].w_rec = Matd::Zero(params.layers[l].w_rec.rows(), params.layers[l].w_rec.cols());
    grads.layers[l].bias = Matd::Zero(params.layers[l].bias.rows(), 1);
  }

  Matd dlogits = probs;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int label = labels[static_cast<std::size_t>(b)];
    if (label < 0 || label >= config.num_classes)
      throw data_error(ErrorCode::bad_row, "label index outside the class range");
    dlogits(label, b) -= 1.0;
  }
  dlogits /= static_cast<double>(batch);

  grads.head_w = dlogits * cache.head_input.transpose();
  grads.head_b = dlogits.rowwise().sum();

  // dh arriving at each layer's output, per timestep
  std::vector<Matd> dh_above(static_cast<std::size_t>(time_steps), Matd::Zero(h, batch));
  {
    Matd dh_top = params.head_w.transpose() * dlogits;
    const auto& top = cache.layers.back().back();
    if (top.mask.size()) dh_top = (dh_top.array() * top.mask.array()).matrix();
    dh_above[static_cast<std::size_t>(time_steps - 1)] = std::move(dh_top);
  }

  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const auto& layer = params.layers[li];
    auto& layer_grads = grads.layers[li];
    const auto& layer_cache = cache.layers[li];
    std::vector<Matd> dx_below;
    if (li > 0) dx_below.assign(static_cast<std::size_t>(time_steps), Matd());

    Matd dh_next = Matd::Zero(h, batch);
    Matd dc_next = Matd::Zero(h, batch);
    Matd dz(4 * h, batch);
    for (int t = time_steps - 1; t >= 0; --t) {
      const auto& sc = layer_cache[static_cast<std::size_t>(t)];
      Matd dh = dh_above[static_cast<std::size_t>(t)] + dh_next;

      auto i = sc.i.array();
      auto f = sc.f.array();
      auto g = sc.g.array();
      auto o = sc.o.array();
      auto tanh_c = sc.tanh_c.array();

      Eigen::ArrayXXd dct = dh.array() * o * (1.0 - tanh_c.square()) + dc_next.array();
      Eigen::ArrayXXd c_prev = Eigen::ArrayXXd::Zero(h, batch);
      if (t > 0) c_prev = layer_cache[static_cast<std::size_t>(t - 1)].c.array();

      dz.topRows(h) = (dct * g * i * (1.0 - i)).matrix();
      dz.middleRows(h, h) = (dct * c_prev * f * (1.0 - f)).matrix();
      dz.middleRows(2 * h, h) = (dct * i * (1.0 - g.square())).matrix();
      dz.bottomRows(h) = (dh.array() * tanh_c * o * (1.0 - o)).matrix();
      dc_next = (dct * f).matrix();

      layer_grads.w_in += dz * sc.x.transpose();
      if (t > 0)
        layer_grads.w_rec += dz * layer_cache[static_cast<std::size_t>(t - 1)].h.transpose();
      layer_grads.bias += dz.rowwise().sum();
      dh_next = layer.w_rec.transpose() * dz;

      if (li > 0) {
        Matd dx = layer.w_in.transpose() * dz;
        const auto& below = cache.layers[li - 1][static_cast<std::size_t>(t)];
        if (below.mask.size()) dx = (dx.array() * below.mask.array()).matrix();
        dx_below[static_cast<std::size_t>(t)] = std::move(dx);
      }
    }
    if (li > 0) dh_above = std::move(dx_below);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Adam

AdamState make_adam_state(const LstmParams& params) {
  AdamState state;
  for (const Matd* tensor : params.tensors()) {
    state.m.push_back(Matd::Zero(tensor->rows(), tensor->cols()));
    state.v.push_back(Matd::Zero(tensor->rows(), tensor->cols()));
  }
  return state;
}

void adam_step(LstmParams& params, const Gradients& grads, AdamState& state,
               double learning_rate) {
  auto param_tensors = params.tensors();
  auto grad_tensors = grads.tensors();
  if (param_tensors.size() != grad_tensors.size() || state.m.size() != param_tensors.size())
    throw data_error(ErrorCode::shape_mismatch, "optimizer state does not match the params");
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < param_tensors.size(); ++k) {
    const Matd& g = *grad_tensors[k];
    Matd& m = state.m[k];
    Matd& v = state.v[k];
    if (g.rows() != m.rows() || g.cols() != m.cols())
      throw data_error(ErrorCode::shape_mismatch, "gradient shape does not match the params");
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = (state.beta2 * v.array() + (1.0 - state.beta2) * g.array().square()).matrix();
    *param_tensors[k] -=
        (learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.epsilon))
            .matrix();
  }
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Batch {
  std::vector<Matd> steps;
  std::vector<int> labels;
};

Batch gather_batch(const FeatureTable& table, const std::vector<std::size_t>& anchors,
                   std::size_t offset, std::size_t count, int window) {
  Batch batch;
  const auto dim = table.rows.front().features.size();
  batch.steps.assign(static_cast<std::size_t>(window),
                     Matd(dim, static_cast<Eigen::Index>(count)));
  batch.labels.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t anchor = anchors[offset + j];
    for (int t = 0; t < window; ++t) {
      const std::size_t row = anchor - static_cast<std::size_t>(window - 1 - t);
      batch.steps[static_cast<std::size_t>(t)].col(static_cast<Eigen::Index>(j)) =
          table.rows[row].features;
    }
    batch.labels[j] = static_cast<int>(table.rows[anchor].label);
  }
  return batch;
}

}  // namespace

TrainResult train(const SplitDataset& split, const ModelConfig& config) {
  validate(config);
  const auto& table = split.train;
  const std::size_t n = table.rows.size();
  const auto window = static_cast<std::size_t>(config.window);
  if (n < window)
    throw data_error(ErrorCode::too_few_rows,
                     "training needs at least window rows, got " + std::to_string(n));
  if (table.feature_count() != config.input_dim)
    throw data_error(ErrorCode::shape_mismatch,
                     "training rows have " + std::to_string(table.feature_count()) +
                         " features but the config expects " + std::to_string(config.input_dim));

  TrainResult result;
  result.params = init_params(config);
  AdamState adam = make_adam_state(result.params);

  std::vector<std::size_t> anchors(n - window + 1);
  std::iota(anchors.begin(), anchors.end(), window - 1);
  std::vector<std::size_t> order(anchors.size());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 shuffle_rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch),
                                    0xFFFFFFFFull));
    shuffle(order, shuffle_rng);

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t offset = 0; offset < order.size();
         offset += static_cast<std::size_t>(config.batch_size), ++batch_index) {
      const std::size_t count =
          std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                order.size() - offset);
      std::vector<std::size_t> batch_anchors(count);
      for (std::size_t j = 0; j < count; ++j) batch_anchors[j] = anchors[order[offset + j]];
      Batch batch = gather_batch(table, batch_anchors, 0, count, config.window);

      ForwardCache cache;
      const std::uint64_t dropout_seed =
          mix_seed(config.seed, static_cast<std::uint64_t>(epoch), batch_index);
      Matd probs = forward(result.params, config, batch.steps, RunMode::train, dropout_seed,
                           &cache);
      const double loss = cross_entropy(probs, batch.labels);
      if (!std::isfinite(loss))
        throw data_error(ErrorCode::non_finite_loss,
                         "loss diverged at epoch " + std::to_string(epoch));
      loss_sum += loss * static_cast<double>(count);

      Gradients grads = backward(result.params, config, cache, probs, batch.labels);
      adam_step(result.params, grads, adam, config.learning_rate);
    }
    result.loss_trace.push_back(loss_sum / static_cast<double>(order.size()));
  }
  return result;
}

std::vector<int> predict(const LstmParams& params, const ModelConfig& config,
                         const FeatureTable& table) {
  validate(config);
  const std::size_t n = table.rows.size();
  const auto window = static_cast<std::size_t>(config.window);
  if (n < window)
    throw data_error(ErrorCode::too_few_rows,
                     "prediction needs at least window rows, got " + std::to_string(n));
  if (table.feature_count() != config.input_dim)
    throw data_error(ErrorCode::shape_mismatch, "row width does not match the config");

  std::vector<std::size_t> anchors(n - window + 1);
  std::iota(anchors.begin(), anchors.end(), window - 1);

  std::vector<int> predictions;
  predictions.reserve(anchors.size());
  for (std::size_t offset = 0; offset < anchors.size();
       offset += static_cast<std::size_t>(config.batch_size)) {
    const std::size_t count = std::min<std::size_t>(
        static_cast<std::size_t>(config.batch_size), anchors.size() - offset);
    Batch batch = gather_batch(table, anchors, offset, count, config.window);
    Matd probs = forward(params, config, batch.steps, RunMode::eval, 0);
    for (Eigen::Index b = 0; b < probs.cols(); ++b) {
      int best = 0;
      for (Eigen::Index r = 1; r < probs.rows(); ++r)
        if (probs(r, b) > probs(best, b)) best = static_cast<int>(r);
      predictions.push_back(best);
    }
  }
  return predictions;
}

std::vector<MovementLabel> to_labels(const std::vector<int>& class_indices) {
  std::vector<MovementLabel> labels;
  labels.reserve(class_indices.size());
  for (int index : class_indices) {
    if (index < 0 || index > 2)
      throw data_error(ErrorCode::bad_row, "class index outside the label range");
    labels.push_back(static_cast<MovementLabel>(index));
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

json tensor_to_json(const Matd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matd tensor_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw data_error(ErrorCode::bad_row, "checkpoint tensor entry is malformed");
  const auto rows = j["rows"].get<Eigen::Index>();
  const auto cols = j["cols"].get<Eigen::Index>();
  const auto& data = j["data"];
  if (rows < 0 || cols < 0 || !data.is_array() ||
      data.size() != static_cast<std::size_t>(rows * cols))
    throw data_error(ErrorCode::shape_mismatch, "checkpoint tensor size is inconsistent");
  Matd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  return m;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const LstmParams& params,
                     const ModelConfig& config) {
  json j{{"format", 1},
         {"config",
          {{"input_dim", config.input_dim},
           {"hidden_units", config.hidden_units},
           {"num_layers", config.num_layers},
           {"dropout_rate", config.dropout_rate},
           {"num_classes", config.num_classes},
           {"learning_rate", config.learning_rate},
           {"epochs", config.epochs},
           {"batch_size", config.batch_size},
           {"window", config.window},
           {"seed", config.seed}}}};
  json tensors = json::array();
  for (const Matd* tensor : params.tensors()) tensors.push_back(tensor_to_json(*tensor));
  j["tensors"] = std::move(tensors);

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw config_error(ErrorCode::bad_config, "cannot write checkpoint: " + path.string());
  out << j.dump(2) << '\n';
}

std::pair<LstmParams, ModelConfig> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw config_error(ErrorCode::bad_config, "cannot read checkpoint: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("config") || !j.contains("tensors"))
    throw data_error(ErrorCode::bad_row, "checkpoint file is malformed: " + path.string());

  const json& c = j["config"];
  ModelConfig config;
  config.input_dim = c.value("input_dim", config.input_dim);
  config.hidden_units = c.value("hidden_units", config.hidden_units);
  config.num_layers = c.value("num_layers", config.num_layers);
  config.dropout_rate = c.value("dropout_rate", config.dropout_rate);
  config.num_classes = c.value("num_classes", config.num_classes);
  config.learning_rate = c.value("learning_rate", config.learning_rate);
  config.epochs = c.value("epochs", config.epochs);
  config.batch_size = c.value("batch_size", config.batch_size);
  config.window = c.value("window", config.window);
  config.seed = c.value("seed", config.seed);
  validate(config);

  LstmParams params = init_params(config);
  auto tensors = params.tensors();
  const json& stored = j["tensors"];
  if (!stored.is_array() || stored.size() != tensors.size())
    throw data_error(ErrorCode::shape_mismatch, "checkpoint tensor count is wrong");
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    Matd loaded = tensor_from_json(stored[k]);
    if (loaded.rows() != tensors[k]->rows() || loaded.cols() != tensors[k]->cols())
      throw data_error(ErrorCode::shape_mismatch, "checkpoint tensor shape is wrong");
    *tensors[k] = std::move(loaded);
  }
  return {std::move(params), config};
}

}  // namespace emostock
