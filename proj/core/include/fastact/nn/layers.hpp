#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fastact/activation.hpp"
#include "fastact/nn/tensor.hpp"
#include "fastact/random.hpp"

namespace fastact::nn {

struct ParamRef {
  std::string name;
  std::span<float> value;
  std::span<float> grad;
};

/// Element-wise activation applications performed in forward passes.
struct ActivationCounters {
  std::uint64_t sigm_slot = 0;
  std::uint64_t tanh_slot = 0;
  std::uint64_t hidden_steps = 0;  ///< hidden units x timesteps x batch rows
};

/// A layer owns its parameters, their gradients, and the cache of its last
/// forward pass. backward() must follow the matching forward().
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string describe() const = 0;
  virtual Tensor forward(const Tensor& input) = 0;
  /// Accumulates parameter gradients; returns the gradient w.r.t. the input.
  virtual Tensor backward(const Tensor& grad_output) = 0;
  virtual std::vector<ParamRef> parameters() { return {}; }
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  virtual void init(Rng&) {}
  virtual const ActivationCounters* counters() const { return nullptr; }
  virtual void reset_counters() {}

  /// When false, backward() skips the input gradient and returns an empty
  /// tensor (first layer of a model).
  void set_input_grad(bool on) noexcept { input_grad_ = on; }
  bool input_grad() const noexcept { return input_grad_; }

 private:
  bool input_grad_ = true;
};

/// y = act(x W + b) over the last dimension; leading dimensions are batch.
class Dense final : public Layer {
 public:
  Dense(std::size_t in, std::size_t out, ActivationSpec activation);

  std::string describe() const override;
  Tensor forward(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamRef> parameters() override;
  void init(Rng& rng) override;

  std::span<float> weights() noexcept { return w_; }  ///< [in x out] row-major
  std::span<float> bias() noexcept { return b_; }

 private:
  std::size_t in_, out_;
  ActivationSpec act_;
  std::vector<float> w_, b_, dw_, db_;
  Tensor input_, pre_;
};

/// Valid 2-D convolution, stride 1, input [B, C, H, W].
class Conv2d final : public Layer {
 public:
  Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
         ActivationSpec activation);

  std::string describe() const override;
  Tensor forward(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamRef> parameters() override;
  void init(Rng& rng) override;

 private:
  std::size_t in_ch_, out_ch_, k_;
  ActivationSpec act_;
  std::vector<float> w_, b_, dw_, db_;  ///< w: [out_ch x in_ch*k*k]
  Shape input_shape_;
  std::vector<float> cols_;  ///< im2col per sample, [B][in_ch*k*k x OH*OW]
  Tensor pre_;
};

/// Non-overlapping max pooling with window and stride k, input [B, C, H, W].
class MaxPool2d final : public Layer {
 public:
  explicit MaxPool2d(std::size_t k);
  std::string describe() const override;
  Tensor forward(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;

 private:
  std::size_t k_;
  Shape input_shape_;
  std::vector<std::size_t> argmax_;
};

/// [B, ...] -> [B, prod(...)].
class Flatten final : public Layer {
 public:
  std::string describe() const override { return "flatten"; }
  Tensor forward(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;

 private:
  Shape input_shape_;
};

}  // namespace fastact::nn
