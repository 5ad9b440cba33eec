#include "fastact/nn/model.hpp"

#include <algorithm>

namespace fastact::nn {

Divergence::Divergence(std::size_t layer, Finiteness kind, std::string stage)
    : Error(std::string(kind == Finiteness::has_nan ? "NaN" : "Inf") + " in " + stage +
            " output of layer " + std::to_string(layer)),
      layer_(layer), kind_(kind), stage_(std::move(stage)) {}

Model& Model::add(std::unique_ptr<Layer> layer) {
  layer->set_input_grad(!layers_.empty());
  layers_.push_back(std::move(layer));
  return *this;
}

std::string Model::describe() const {
  std::string out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (i) out += " -> ";
    out += layers_[i]->describe();
  }
  return out;
}

Tensor Model::forward(const Tensor& input) {
  Tensor x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i]->forward(x);
    if (auto f = x.finiteness(); f != Finiteness::finite) throw Divergence(i, f, "forward");
  }
  return x;
}

void Model::backward(const Tensor& loss_grad) {
  Tensor g = loss_grad;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = layers_[i]->backward(g);
    if (auto f = g.finiteness(); f != Finiteness::finite) throw Divergence(i, f, "backward");
  }
}

std::vector<ParamRef> Model::parameters() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    for (auto& p : layers_[i]->parameters()) {
      p.name = std::to_string(i) + "." + p.name;
      out.push_back(std::move(p));
    }
  return out;
}

std::size_t Model::parameter_count() {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.value.size();
  return n;
}

void Model::zero_grad() {
  for (auto& p : parameters()) std::fill(p.grad.begin(), p.grad.end(), 0.0f);
}

void Model::init(std::uint64_t seed) {
  Rng rng(seed);
  for (auto& l : layers_) l->init(rng);
  zero_grad();
}

ActivationCounters Model::counters() const {
  ActivationCounters total;
  for (const auto& l : layers_)
    if (const auto* c = l->counters()) {
      total.sigm_slot += c->sigm_slot;
      total.tanh_slot += c->tanh_slot;
      total.hidden_steps += c->hidden_steps;
    }
  return total;
}

void Model::reset_counters() {
  for (auto& l : layers_) l->reset_counters();
}

}  // namespace fastact::nn
