#include "fastact/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace fastact::nn {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

LossResult compute_loss(LossKind kind, const Tensor& pred, const Batch& batch) {
  return kind == LossKind::mse ? mse_loss(pred, batch.target)
                               : softmax_cross_entropy(pred, batch.labels);
}

}  // namespace

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.size() != target.size() || pred.size() == 0)
    throw ConfigError("mse: prediction and target sizes differ");
  LossResult r{0.0, Tensor(pred.shape())};
  const double scale = 2.0 / static_cast<double>(pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    sum += d * d;
    r.grad[i] = static_cast<float>(scale * d);
  }
  r.loss = sum / static_cast<double>(pred.size());
  return r;
}

LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() == 0) throw ConfigError("cross entropy: empty logits");
  const std::size_t classes = logits.shape().back();
  const std::size_t rows = logits.size() / classes;
  if (labels.size() != rows) throw ConfigError("cross entropy: label count does not match rows");
  LossResult r{0.0, Tensor(logits.shape())};
  const double inv_rows = 1.0 / static_cast<double>(rows);
  std::vector<double> p(classes);
  double sum = 0.0;
  for (std::size_t row = 0; row < rows; ++row) {
    const float* z = logits.ptr() + row * classes;
    const auto label = static_cast<std::size_t>(labels[row]);
    if (label >= classes) throw ConfigError("cross entropy: label out of range");
    const double zmax = *std::max_element(z, z + classes);
    double norm = 0.0;
    for (std::size_t c = 0; c < classes; ++c) norm += p[c] = std::exp(static_cast<double>(z[c]) - zmax);
    sum += std::log(norm) - (static_cast<double>(z[label]) - zmax);
    float* g = r.grad.ptr() + row * classes;
    for (std::size_t c = 0; c < classes; ++c)
      g[c] = static_cast<float>((p[c] / norm - (c == label ? 1.0 : 0.0)) * inv_rows);
  }
  r.loss = sum * inv_rows;
  return r;
}

void Optimizer::step(std::vector<ParamRef>& params) {
  if (config_.kind == OptimizerConfig::Kind::sgd) {
    const auto lr = static_cast<float>(config_.lr);
    for (auto& p : params)
      for (std::size_t i = 0; i < p.value.size(); ++i) p.value[i] -= lr * p.grad[i];
    return;
  }
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.value.size(), 0.0f);
      v_.emplace_back(p.value.size(), 0.0f);
    }
  }
  ++t_;
  const auto b1 = static_cast<float>(config_.beta1), b2 = static_cast<float>(config_.beta2);
  const double t = static_cast<double>(t_);
  const auto c1 = static_cast<float>(1.0 - std::pow(config_.beta1, t));
  const auto c2 = static_cast<float>(1.0 - std::pow(config_.beta2, t));
  const auto lr = static_cast<float>(config_.lr), eps = static_cast<float>(config_.eps);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    float* m = m_[k].data();
    float* v = v_[k].data();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const float g = p.grad[i];
      m[i] = b1 * m[i] + (1.0f - b1) * g;
      v[i] = b2 * v[i] + (1.0f - b2) * g * g;
      p.value[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(optimizer.lr >= 0.0)) throw ConfigError("learning rate must be >= 0");
  if (!(divergence_threshold > 0.0)) throw ConfigError("divergence threshold must be > 0");
}

std::string to_string(TrainStatus s) {
  switch (s) {
    case TrainStatus::converged: return "converged";
    case TrainStatus::diverged: return "diverged";
    case TrainStatus::nan: return "nan";
  }
  return "?";
}

TrainTrace train(Model& model, BatchSource& source, const TrainConfig& config) {
  config.validate();
  TrainTrace trace;
  const std::size_t n_batches = source.batches_per_epoch();
  if (n_batches == 0) throw ConfigError("dataset yields no batches");
  auto params = model.parameters();
  Optimizer optimizer(config.optimizer);

  auto fail = [&](TrainStatus status, std::optional<std::size_t> layer, std::string stage, double loss) {
    trace.status = status;
    trace.divergence_layer = layer;
    trace.divergence_stage = std::move(stage);
    trace.final_loss = loss;
  };
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  if (config.record_initial_loss) {
    source.start_epoch(0);
    double sum = 0.0;
    try {
      for (std::size_t b = 0; b < n_batches; ++b) {
        const Batch batch = source.batch(b);
        sum += compute_loss(config.loss, model.forward(batch.input), batch).loss;
      }
      trace.initial_loss = sum / static_cast<double>(n_batches);
    } catch (const Divergence& d) {
      trace.initial_loss = d.is_nan() ? kNaN : kInf;
    }
  }
  model.reset_counters();

  const auto start = Clock::now();
  try {
    for (std::size_t epoch = 0; epoch < config.epochs && trace.status == TrainStatus::converged; ++epoch) {
      source.start_epoch(epoch);
      double sum = 0.0;
      for (std::size_t b = 0; b < n_batches; ++b) {
        const Batch batch = source.batch(b);
        model.zero_grad();
        const Tensor out = model.forward(batch.input);
        const LossResult loss = compute_loss(config.loss, out, batch);
        if (std::isnan(loss.loss)) {
          fail(TrainStatus::nan, std::nullopt, "loss", loss.loss);
          break;
        }
        if (!(loss.loss <= config.divergence_threshold)) {
          fail(TrainStatus::diverged, std::nullopt, "loss", loss.loss);
          break;
        }
        model.backward(loss.grad);
        optimizer.step(params);
        sum += loss.loss;
      }
      if (trace.status != TrainStatus::converged) break;
      const double mean = sum / static_cast<double>(n_batches);
      trace.epochs.push_back({epoch + 1, mean, seconds_since(start)});
      trace.final_loss = mean;
    }
  } catch (const Divergence& d) {
    fail(d.is_nan() ? TrainStatus::nan : TrainStatus::diverged, d.layer(), d.stage(),
         d.is_nan() ? kNaN : kInf);
  }
  trace.total_seconds = seconds_since(start);
  trace.counters = model.counters();
  return trace;
}

double InferStats::mean_seconds() const {
  return samples.empty() ? 0.0 : total_seconds / static_cast<double>(samples.size());
}

double InferStats::min_seconds() const {
  return samples.empty() ? 0.0 : *std::min_element(samples.begin(), samples.end());
}

InferStats infer_benchmark(Model& model, const Tensor& input, std::size_t repeat) {
  InferStats stats;
  stats.repeat = repeat;
  stats.samples.reserve(repeat);
  for (std::size_t i = 0; i < repeat; ++i) {
    const auto start = Clock::now();
    const Tensor out = model.forward(input);
    stats.samples.push_back(seconds_since(start));
  }
  stats.total_seconds = std::accumulate(stats.samples.begin(), stats.samples.end(), 0.0);
  return stats;
}

}  // namespace fastact::nn
