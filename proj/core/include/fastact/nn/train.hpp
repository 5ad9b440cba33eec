#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastact/nn/model.hpp"

namespace fastact::nn {

enum class LossKind { mse, cross_entropy };

struct LossResult {
  double loss = 0.0;
  Tensor grad;  ///< d loss / d prediction
};

/// Mean over all elements of (pred - target)^2.
LossResult mse_loss(const Tensor& pred, const Tensor& target);

/// Softmax cross-entropy over the last dimension, mean over rows.
LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels);

struct OptimizerConfig {
  enum class Kind { adam, sgd } kind = Kind::adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerConfig adam(double lr = 1e-3) { return {Kind::adam, lr}; }
  static OptimizerConfig sgd(double lr) { return {Kind::sgd, lr}; }
};

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}
  void step(std::vector<ParamRef>& params);

 private:
  OptimizerConfig config_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<float>> m_, v_;
};

struct Batch {
  Tensor input;
  Tensor target;            ///< mse targets
  std::vector<int> labels;  ///< cross-entropy labels, one per output row
};

/// Deterministic source of minibatches; the order may depend on the epoch.
class BatchSource {
 public:
  virtual ~BatchSource() = default;
  virtual std::size_t batches_per_epoch() const = 0;
  virtual void start_epoch(std::size_t epoch) = 0;
  virtual Batch batch(std::size_t index) const = 0;
};

struct TrainConfig {
  std::size_t epochs = 1;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  OptimizerConfig optimizer = OptimizerConfig::adam();
  LossKind loss = LossKind::mse;
  double divergence_threshold = 1e4;
  /// Evaluate the epoch-0 batches once before any update.
  bool record_initial_loss = false;

  void validate() const;
};

enum class TrainStatus { converged, diverged, nan };
std::string to_string(TrainStatus s);

struct EpochRecord {
  std::size_t epoch = 0;  ///< 1-based
  double loss = 0.0;      ///< mean batch loss
  double cumulative_seconds = 0.0;
};

struct TrainTrace {
  std::vector<EpochRecord> epochs;
  TrainStatus status = TrainStatus::converged;
  double total_seconds = 0.0;
  double final_loss = 0.0;
  std::optional<double> initial_loss;
  std::optional<std::size_t> divergence_layer;  ///< set when a layer produced NaN/Inf
  std::string divergence_stage;                 ///< "forward", "backward" or "loss"
  ActivationCounters counters;
};

/// Runs the training loop. Divergence (non-finite values anywhere, or a
/// batch loss above the threshold) ends training and is reported in the
/// trace status. Wall time covers the loop only.
TrainTrace train(Model& model, BatchSource& source, const TrainConfig& config);

struct InferStats {
  std::size_t repeat = 0;
  double total_seconds = 0.0;
  std::vector<double> samples;  ///< seconds per inference
  double mean_seconds() const;
  double min_seconds() const;
};

/// `repeat` sequential forward passes on the same input.
InferStats infer_benchmark(Model& model, const Tensor& input, std::size_t repeat);

}  // namespace fastact::nn
