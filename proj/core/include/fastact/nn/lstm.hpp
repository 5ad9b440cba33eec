#pragma once

#include "fastact/nn/layers.hpp"

namespace fastact::nn {

/// Gate sigmoid is applied to the input, forget and output gates; cell tanh
/// to the candidate and to the cell state before the output gate.
struct LstmGateConfig {
  ActivationSpec gate_sigmoid;
  ActivationSpec cell_tanh;
};

/// Single LSTM layer over [B, T, in] -> [B, T, hidden], zero initial state,
/// trained with full backpropagation through time.
///
/// Gate pre-activations are x Wx + h Wh + b with column blocks [i | f | o | g].
class Lstm final : public Layer {
 public:
  Lstm(std::size_t in, std::size_t hidden, LstmGateConfig gates);

  std::string describe() const override;
  Tensor forward(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamRef> parameters() override;
  void init(Rng& rng) override;
  const ActivationCounters* counters() const override { return &counters_; }
  void reset_counters() override { counters_ = {}; }

  std::span<float> input_weights() noexcept { return wx_; }      ///< [in x 4H]
  std::span<float> recurrent_weights() noexcept { return wh_; }  ///< [H x 4H]
  std::span<float> bias() noexcept { return b_; }                ///< [4H]

 private:
  std::size_t in_, hidden_;
  LstmGateConfig gates_;
  std::vector<float> wx_, wh_, b_, dwx_, dwh_, db_;
  ActivationCounters counters_;

  // Time-major caches of the last forward pass.
  std::size_t batch_ = 0, steps_ = 0;
  std::vector<float> xs_;    ///< [T][B][in]
  std::vector<float> pre_;   ///< [T][B][4H] gate pre-activations
  std::vector<float> act_;   ///< [T][B][4H] activated gates
  std::vector<float> c_;     ///< [T+1][B][H], c_[0] = 0
  std::vector<float> tc_;    ///< [T][B][H] tanh(c)
  std::vector<float> h_;     ///< [T+1][B][H], h_[0] = 0
};

}  // namespace fastact::nn
