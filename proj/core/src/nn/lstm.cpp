#include "fastact/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "eigen_maps.hpp"

namespace fastact::nn {

Lstm::Lstm(std::size_t in, std::size_t hidden, LstmGateConfig gates)
    : in_(in), hidden_(hidden), gates_(std::move(gates)),
      wx_(in * 4 * hidden), wh_(hidden * 4 * hidden), b_(4 * hidden),
      dwx_(wx_.size()), dwh_(wh_.size()), db_(b_.size()) {
  if (in == 0 || hidden == 0) throw ConfigError("lstm dimensions must be positive");
}

std::string Lstm::describe() const {
  return "lstm(" + std::to_string(in_) + ", " + std::to_string(hidden_) + ", " +
         gates_.gate_sigmoid.name() + "/" + gates_.cell_tanh.name() + ")";
}

Tensor Lstm::forward(const Tensor& input) {
  if (input.rank() != 3 || input.dim(2) != in_)
    throw ConfigError(describe() + ": expected input [B, T, " + std::to_string(in_) + "]");
  const std::size_t B = input.dim(0), T = input.dim(1), H = hidden_, G = 4 * H;
  batch_ = B;
  steps_ = T;
  xs_.resize(T * B * in_);
  pre_.resize(T * B * G);
  act_.resize(T * B * G);
  c_.assign((T + 1) * B * H, 0.0f);
  tc_.resize(T * B * H);
  h_.assign((T + 1) * B * H, 0.0f);

  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < T; ++t)
      std::copy_n(input.ptr() + (b * T + t) * in_, in_, xs_.data() + (t * B + b) * in_);

  auto wx = cmap(wx_.data(), in_, G);
  auto wh = cmap(wh_.data(), H, G);
  const Eigen::Map<const RowVec> bias(b_.data(), static_cast<Eigen::Index>(G));

  for (std::size_t t = 0; t < T; ++t) {
    auto z = map(pre_.data() + t * B * G, B, G);
    z.noalias() = cmap(xs_.data() + t * B * in_, B, in_) * wx;
    z.noalias() += cmap(h_.data() + t * B * H, B, H) * wh;
    z.rowwise() += bias;

    for (std::size_t b = 0; b < B; ++b) {
      const float* zr = pre_.data() + (t * B + b) * G;
      float* ar = act_.data() + (t * B + b) * G;
      gates_.gate_sigmoid.apply({zr, 3 * H}, {ar, 3 * H});
      gates_.cell_tanh.apply({zr + 3 * H, H}, {ar + 3 * H, H});

      const float* c_prev = c_.data() + (t * B + b) * H;
      float* c = c_.data() + ((t + 1) * B + b) * H;
      for (std::size_t j = 0; j < H; ++j) c[j] = ar[H + j] * c_prev[j] + ar[j] * ar[3 * H + j];
      float* tc = tc_.data() + (t * B + b) * H;
      gates_.cell_tanh.apply({c, H}, {tc, H});
      float* h = h_.data() + ((t + 1) * B + b) * H;
      for (std::size_t j = 0; j < H; ++j) h[j] = ar[2 * H + j] * tc[j];
    }
  }
  counters_.sigm_slot += 3 * B * T * H;
  counters_.tanh_slot += 2 * B * T * H;
  counters_.hidden_steps += B * T * H;

  Tensor out({B, T, H});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < T; ++t)
      std::copy_n(h_.data() + ((t + 1) * B + b) * H, H, out.ptr() + (b * T + t) * H);
  return out;
}

Tensor Lstm::backward(const Tensor& grad_output) {
  const std::size_t B = batch_, T = steps_, H = hidden_, G = 4 * H;
  std::vector<float> dh(B * H, 0.0f), dc(B * H, 0.0f), dpre(B * G);
  std::vector<float> dsig(3 * H), dtanh(H), dtc(H);
  Tensor dx(input_grad() ? Shape{B, T, in_} : Shape{0});

  auto wx = cmap(wx_.data(), in_, G);
  auto wh = cmap(wh_.data(), H, G);
  auto dwx = map(dwx_.data(), in_, G);
  auto dwh = map(dwh_.data(), H, G);
  Eigen::Map<RowVec> db(db_.data(), static_cast<Eigen::Index>(G));
  MatR dx_t(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(in_));

  for (std::size_t t = T; t-- > 0;) {
    for (std::size_t b = 0; b < B; ++b) {
      const float* zr = pre_.data() + (t * B + b) * G;
      const float* ar = act_.data() + (t * B + b) * G;
      const float* c_prev = c_.data() + (t * B + b) * H;
      const float* c = c_.data() + ((t + 1) * B + b) * H;
      const float* tc = tc_.data() + (t * B + b) * H;
      const float* up = grad_output.ptr() + (b * T + t) * H;
      float* dhr = dh.data() + b * H;
      float* dcr = dc.data() + b * H;
      float* dz = dpre.data() + b * G;

      gates_.gate_sigmoid.apply_derivative({zr, 3 * H}, dsig);
      gates_.cell_tanh.apply_derivative({zr + 3 * H, H}, dtanh);
      gates_.cell_tanh.apply_derivative({c, H}, dtc);

      for (std::size_t j = 0; j < H; ++j) {
        const float i = ar[j], f = ar[H + j], o = ar[2 * H + j], g = ar[3 * H + j];
        const float dht = dhr[j] + up[j];
        const float dct = dcr[j] + dht * o * dtc[j];
        dz[j] = dct * g * dsig[j];
        dz[H + j] = dct * c_prev[j] * dsig[H + j];
        dz[2 * H + j] = dht * tc[j] * dsig[2 * H + j];
        dz[3 * H + j] = dct * i * dtanh[j];
        dcr[j] = dct * f;
      }
    }
    auto g = cmap(dpre.data(), B, G);
    dwx.noalias() += cmap(xs_.data() + t * B * in_, B, in_).transpose() * g;
    dwh.noalias() += cmap(h_.data() + t * B * H, B, H).transpose() * g;
    db += g.colwise().sum();
    map(dh.data(), B, H).noalias() = g * wh.transpose();
    if (!input_grad()) continue;
    dx_t.noalias() = g * wx.transpose();
    for (std::size_t b = 0; b < B; ++b)
      std::copy_n(dx_t.data() + b * in_, in_, dx.ptr() + (b * T + t) * in_);
  }
  if (!input_grad()) return {};
  return dx;
}

std::vector<ParamRef> Lstm::parameters() {
  return {{"lstm.wx", wx_, dwx_}, {"lstm.wh", wh_, dwh_}, {"lstm.b", b_, db_}};
}

void Lstm::init(Rng& rng) {
  const double bound_x = 1.0 / std::sqrt(static_cast<double>(in_));
  const double bound_h = 1.0 / std::sqrt(static_cast<double>(hidden_));
  for (auto& v : wx_) v = static_cast<float>(rng.uniform(-bound_x, bound_x));
  for (auto& v : wh_) v = static_cast<float>(rng.uniform(-bound_h, bound_h));
  std::fill(b_.begin(), b_.end(), 0.0f);
}

}  // namespace fastact::nn
