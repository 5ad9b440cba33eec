#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fastact/error.hpp"
#include "fastact/nn/layers.hpp"

namespace fastact::nn {

/// A non-finite value appeared in the output of a layer.
class Divergence : public Error {
 public:
  Divergence(std::size_t layer, Finiteness kind, std::string stage);
  std::size_t layer() const noexcept { return layer_; }
  bool is_nan() const noexcept { return kind_ == Finiteness::has_nan; }
  const std::string& stage() const noexcept { return stage_; }  ///< "forward" / "backward"

 private:
  std::size_t layer_;
  Finiteness kind_;
  std::string stage_;
};

/// Sequential stack of layers. Every layer output (forward) and every
/// input gradient (backward) is checked for NaN/Inf.
class Model {
 public:
  Model() = default;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  Model& add(std::unique_ptr<Layer> layer);
  template <class L, class... Args>
  Model& emplace(Args&&... args) {
    return add(std::make_unique<L>(std::forward<Args>(args)...));
  }

  std::size_t size() const noexcept { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  std::string describe() const;

  Tensor forward(const Tensor& input);
  void backward(const Tensor& loss_grad);

  std::vector<ParamRef> parameters();
  std::size_t parameter_count();
  void zero_grad();
  void init(std::uint64_t seed);

  /// Sum over layers that keep activation counters.
  ActivationCounters counters() const;
  void reset_counters();

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace fastact::nn
