#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "emostock/dataset.hpp"
#include "emostock/linalg.hpp"

namespace emostock {

struct ModelConfig {
  int input_dim = 5;
  int hidden_units = 128;
  int num_layers = 2;
  double dropout_rate = 0.2;
  int num_classes = 3;
  double learning_rate = 0.01;
  int epochs = 200;
  int batch_size = 32;
  int window = 1;               // timesteps per training sequence
  std::uint64_t seed = 42;
};

void validate(const ModelConfig& config);

// Gate rows are stacked (input, forget, cell, output), H rows each.
struct LayerParams {
  Matd w_in;   // 4H x D
  Matd w_rec;  // 4H x H
  Matd bias;   // 4H x 1
};

struct LstmParams {
  std::vector<LayerParams> layers;
  Matd head_w;  // C x H
  Matd head_b;  // C x 1

  // Canonical tensor order: per layer w_in, w_rec, bias; then head_w, head_b.
  std::vector<Matd*> tensors();
  std::vector<const Matd*> tensors() const;
};

using Gradients = LstmParams;

// Uniform +-1/sqrt(H) weights from a single seeded stream (column-major fill
// order); biases zero except the forget gate block, which starts at one.
LstmParams init_params(const ModelConfig& config);

// ---------------------------------------------------------------------------
// Forward / backward

enum class RunMode { train, eval };

struct StepCache {
  Matd x;        // layer input after any dropout from below (D or H) x B
  Matd i, f, g, o;
  Matd c, tanh_c;
  Matd h;        // before this layer's own dropout
  Matd mask;     // empty when dropout is off
};

struct ForwardCache {
  std::vector<std::vector<StepCache>> layers;  // [layer][time]
  Matd head_input;  // top hidden state at the last step, after dropout
  int time_steps = 0;
  int batch = 0;
  int input_dim = 0;
  int hidden = 0;
  int classes = 0;
  bool train = false;
};

// steps[t] is input_dim x batch; returns classes x batch column softmax.
// Dropout masks are a pure function of (dropout_seed, layer, timestep), so a
// given seed reproduces the exact run. Pass cache to enable backward().
Matd forward(const LstmParams& params, const ModelConfig& config,
             const std::vector<Matd>& steps, RunMode mode,
             std::uint64_t dropout_seed, ForwardCache* cache = nullptr);

// Mean negative log-likelihood over the batch.
double cross_entropy(const Matd& probs, const std::vector<int>& labels);

// Truncation-free BPTT over the cached forward pass.
Gradients backward(const LstmParams& params, const ModelConfig& config,
                   const ForwardCache& cache, const Matd& probs,
                   const std::vector<int>& labels);

// Inverted-dropout mask: entries are 0 or 1/(1-rate), column-major draw order.
Matd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  std::vector<Matd> m, v;  // canonical tensor order
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam_state(const LstmParams& params);
void adam_step(LstmParams& params, const Gradients& grads, AdamState& state,
               double learning_rate);

// ---------------------------------------------------------------------------
// Training and prediction

struct TrainResult {
  LstmParams params;
  std::vector<double> loss_trace;  // one mean per-sample loss per epoch
};

// Trains on split.train (already scaled). Epoch shuffling, batch dropout and
// parameter init all derive from config.seed alone.
TrainResult train(const SplitDataset& split, const ModelConfig& config);

// Label index per anchor row (window-1 .. n-1); argmax ties pick the lowest
// class index.
std::vector<int> predict(const LstmParams& params, const ModelConfig& config,
                         const FeatureTable& table);

std::vector<MovementLabel> to_labels(const std::vector<int>& class_indices);

// ---------------------------------------------------------------------------
// Checkpoints

void save_checkpoint(const std::filesystem::path& path, const LstmParams& params,
                     const ModelConfig& config);
std::pair<LstmParams, ModelConfig> load_checkpoint(const std::filesystem::path& path);

}  // namespace emostock
