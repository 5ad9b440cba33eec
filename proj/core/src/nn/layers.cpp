#include "fastact/nn/layers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "eigen_maps.hpp"

namespace fastact::nn {
namespace {

void init_uniform(std::vector<float>& w, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : w) v = static_cast<float>(rng.uniform(-bound, bound));
}

// grad * act'(pre), element-wise, in place on `grad`.
void times_activation_derivative(const ActivationSpec& act, const Tensor& pre, Tensor& grad) {
  std::vector<float> d(pre.size());
  act.apply_derivative(pre.data(), d);
  auto g = grad.data();
  for (std::size_t i = 0; i < d.size(); ++i) g[i] *= d[i];
}

}  // namespace

// ---------------------------------------------------------------------------

Dense::Dense(std::size_t in, std::size_t out, ActivationSpec activation)
    : in_(in), out_(out), act_(std::move(activation)),
      w_(in * out), b_(out), dw_(in * out), db_(out) {
  if (in == 0 || out == 0) throw ConfigError("dense layer dimensions must be positive");
}

std::string Dense::describe() const {
  return "dense(" + std::to_string(in_) + ", " + std::to_string(out_) + ", " + act_.name() + ")";
}

Tensor Dense::forward(const Tensor& input) {
  if (input.rank() == 0 || input.shape().back() != in_)
    throw ConfigError(describe() + ": input last dimension must be " + std::to_string(in_));
  const auto rows = static_cast<Eigen::Index>(input.size() / in_);
  input_ = input;
  Shape shape = input.shape();
  shape.back() = out_;
  pre_ = Tensor(shape);

  auto x = cmap(input_.ptr(), rows, in_);
  auto w = cmap(w_.data(), in_, out_);
  auto z = map(pre_.ptr(), rows, out_);
  z.noalias() = x * w;
  z.rowwise() += Eigen::Map<const RowVec>(b_.data(), static_cast<Eigen::Index>(out_));

  Tensor out(shape);
  act_.apply(pre_.data(), out.data());
  return out;
}

Tensor Dense::backward(const Tensor& grad_output) {
  const auto rows = static_cast<Eigen::Index>(grad_output.size() / out_);
  Tensor dz = grad_output;
  times_activation_derivative(act_, pre_, dz);

  auto x = cmap(input_.ptr(), rows, in_);
  auto g = cmap(dz.ptr(), rows, out_);
  map(dw_.data(), in_, out_).noalias() += x.transpose() * g;
  Eigen::Map<RowVec>(db_.data(), static_cast<Eigen::Index>(out_)) += g.colwise().sum();

  if (!input_grad()) return {};
  Tensor dx(input_.shape());
  map(dx.ptr(), rows, in_).noalias() = g * cmap(w_.data(), in_, out_).transpose();
  return dx;
}

std::vector<ParamRef> Dense::parameters() {
  return {{"dense.w", w_, dw_}, {"dense.b", b_, db_}};
}

void Dense::init(Rng& rng) {
  init_uniform(w_, in_, rng);
  std::fill(b_.begin(), b_.end(), 0.0f);
}

// ---------------------------------------------------------------------------

Conv2d::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
               ActivationSpec activation)
    : in_ch_(in_channels), out_ch_(out_channels), k_(kernel), act_(std::move(activation)),
      w_(out_channels * in_channels * kernel * kernel), b_(out_channels),
      dw_(w_.size()), db_(out_channels) {
  if (in_ch_ == 0 || out_ch_ == 0 || k_ == 0) throw ConfigError("conv2d dimensions must be positive");
}

std::string Conv2d::describe() const {
  return "conv2d(" + std::to_string(in_ch_) + ", " + std::to_string(out_ch_) + ", " +
         std::to_string(k_) + "x" + std::to_string(k_) + ", " + act_.name() + ")";
}

Tensor Conv2d::forward(const Tensor& input) {
  if (input.rank() != 4 || input.dim(1) != in_ch_ || input.dim(2) < k_ || input.dim(3) < k_)
    throw ConfigError(describe() + ": expected input [B, " + std::to_string(in_ch_) + ", H>=k, W>=k]");
  input_shape_ = input.shape();
  const std::size_t batch = input.dim(0), h = input.dim(2), w = input.dim(3);
  const std::size_t oh = h - k_ + 1, ow = w - k_ + 1, p = oh * ow;
  const std::size_t ckk = in_ch_ * k_ * k_;

  cols_.assign(batch * ckk * p, 0.0f);
  pre_ = Tensor({batch, out_ch_, oh, ow});
  auto wmat = cmap(w_.data(), out_ch_, ckk);
  auto bias = Eigen::Map<const ColVec>(b_.data(), static_cast<Eigen::Index>(out_ch_));

  for (std::size_t b = 0; b < batch; ++b) {
    const float* src = input.ptr() + b * in_ch_ * h * w;
    float* col = cols_.data() + b * ckk * p;
    for (std::size_t c = 0; c < in_ch_; ++c)
      for (std::size_t ki = 0; ki < k_; ++ki)
        for (std::size_t kj = 0; kj < k_; ++kj) {
          float* row = col + ((c * k_ + ki) * k_ + kj) * p;
          for (std::size_t y = 0; y < oh; ++y) {
            const float* line = src + (c * h + y + ki) * w + kj;
            std::copy_n(line, ow, row + y * ow);
          }
        }
    auto out = map(pre_.ptr() + b * out_ch_ * p, out_ch_, p);
    out.noalias() = wmat * cmap(col, ckk, p);
    out.colwise() += bias;
  }

  Tensor out(pre_.shape());
  act_.apply(pre_.data(), out.data());
  return out;
}

Tensor Conv2d::backward(const Tensor& grad_output) {
  const std::size_t batch = input_shape_[0], h = input_shape_[2], w = input_shape_[3];
  const std::size_t oh = h - k_ + 1, ow = w - k_ + 1, p = oh * ow;
  const std::size_t ckk = in_ch_ * k_ * k_;

  Tensor dz = grad_output;
  times_activation_derivative(act_, pre_, dz);

  Tensor dx(input_grad() ? input_shape_ : Shape{0});
  auto wmat = cmap(w_.data(), out_ch_, ckk);
  auto dw = map(dw_.data(), out_ch_, ckk);
  auto db = Eigen::Map<ColVec>(db_.data(), static_cast<Eigen::Index>(out_ch_));
  MatR dcol(static_cast<Eigen::Index>(ckk), static_cast<Eigen::Index>(p));

  for (std::size_t b = 0; b < batch; ++b) {
    auto g = cmap(dz.ptr() + b * out_ch_ * p, out_ch_, p);
    auto col = cmap(cols_.data() + b * ckk * p, ckk, p);
    dw.noalias() += g * col.transpose();
    db += g.rowwise().sum();
    if (!input_grad()) continue;
    dcol.noalias() = wmat.transpose() * g;

    float* dst = dx.ptr() + b * in_ch_ * h * w;
    for (std::size_t c = 0; c < in_ch_; ++c)
      for (std::size_t ki = 0; ki < k_; ++ki)
        for (std::size_t kj = 0; kj < k_; ++kj) {
          const float* row = dcol.data() + ((c * k_ + ki) * k_ + kj) * p;
          for (std::size_t y = 0; y < oh; ++y) {
            float* line = dst + (c * h + y + ki) * w + kj;
            const float* r = row + y * ow;
            for (std::size_t x = 0; x < ow; ++x) line[x] += r[x];
          }
        }
  }
  if (!input_grad()) return {};
  return dx;
}

std::vector<ParamRef> Conv2d::parameters() {
  return {{"conv2d.w", w_, dw_}, {"conv2d.b", b_, db_}};
}

void Conv2d::init(Rng& rng) {
  init_uniform(w_, in_ch_ * k_ * k_, rng);
  std::fill(b_.begin(), b_.end(), 0.0f);
}

// ---------------------------------------------------------------------------

MaxPool2d::MaxPool2d(std::size_t k) : k_(k) {
  if (k == 0) throw ConfigError("pool size must be positive");
}

std::string MaxPool2d::describe() const { return "maxpool(" + std::to_string(k_) + ")"; }

Tensor MaxPool2d::forward(const Tensor& input) {
  if (input.rank() != 4 || input.dim(2) < k_ || input.dim(3) < k_)
    throw ConfigError(describe() + ": expected input [B, C, H>=k, W>=k]");
  input_shape_ = input.shape();
  const std::size_t planes = input.dim(0) * input.dim(1), h = input.dim(2), w = input.dim(3);
  const std::size_t oh = h / k_, ow = w / k_;
  Tensor out({input.dim(0), input.dim(1), oh, ow});
  argmax_.resize(out.size());
  std::size_t o = 0;
  for (std::size_t pl = 0; pl < planes; ++pl) {
    const std::size_t base = pl * h * w;
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x, ++o) {
        std::size_t best = base + (y * k_) * w + x * k_;
        for (std::size_t dy = 0; dy < k_; ++dy)
          for (std::size_t dx = 0; dx < k_; ++dx) {
            const std::size_t idx = base + (y * k_ + dy) * w + x * k_ + dx;
            if (input[idx] > input[best]) best = idx;
          }
        argmax_[o] = best;
        out[o] = input[best];
      }
  }
  return out;
}

Tensor MaxPool2d::backward(const Tensor& grad_output) {
  Tensor dx(input_shape_);
  for (std::size_t o = 0; o < argmax_.size(); ++o) dx[argmax_[o]] += grad_output[o];
  return dx;
}

// ---------------------------------------------------------------------------

Tensor Flatten::forward(const Tensor& input) {
  input_shape_ = input.shape();
  Tensor out = input;
  out.reshape({input.dim(0), input.size() / input.dim(0)});
  return out;
}

Tensor Flatten::backward(const Tensor& grad_output) {
  Tensor dx = grad_output;
  dx.reshape(input_shape_);
  return dx;
}

}  // namespace fastact::nn
