#include <gtest/gtest.h>

#include <cmath>

#include "fastact/catalog.hpp"
#include "fastact/nn/lstm.hpp"
#include "fastact/nn/model.hpp"
#include "fastact/nn/train.hpp"
#include "fastact/nn/workloads.hpp"

using namespace fastact;
using namespace fastact::nn;

namespace {

const ActivationSpec& act(const char* name) { return Catalog::instance().get(name); }

Tensor random_tensor(Shape shape, std::uint64_t seed, double lo = -1, double hi = 1) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.data()) v = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

struct GradCheck {
  double max_rel = 0;
  std::size_t checked = 0;
};

// Central differences of `loss` over every parameter, compared with the
// gradients left by one forward/backward pass. Components much smaller than
// the largest are measured relative to that largest one: f32 forward passes
// cannot resolve their differences any better.
template <class LossFn>
GradCheck check_parameter_gradients(Model& model, LossFn loss, double h) {
  model.zero_grad();
  loss(true);
  auto params = model.parameters();
  std::vector<std::vector<float>> analytic;
  double gmax = 0;
  for (auto& p : params) {
    analytic.emplace_back(p.grad.begin(), p.grad.end());
    for (float g : p.grad) gmax = std::max(gmax, std::abs(static_cast<double>(g)));
  }
  GradCheck r;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < params[k].value.size(); ++i) {
      float& w = params[k].value[i];
      const float w0 = w;
      w = static_cast<float>(w0 + h);
      const double up = loss(false);
      w = static_cast<float>(w0 - h);
      const double down = loss(false);
      w = w0;
      const double fd = (up - down) / (2 * h);
      const double an = analytic[k][i];
      const double scale = std::max({std::abs(fd), std::abs(an), 1e-2 * gmax});
      r.max_rel = std::max(r.max_rel, std::abs(an - fd) / scale);
      ++r.checked;
    }
  }
  return r;
}

}  // namespace

TEST(Forward, DenseIdentityWeights) {
  Model m;
  m.emplace<Dense>(3, 3, act("identity"));
  auto& d = static_cast<Dense&>(m.layer(0));
  std::fill(d.weights().begin(), d.weights().end(), 0.0f);
  for (int i = 0; i < 3; ++i) d.weights()[i * 3 + i] = 1.0f;
  const Tensor x({2, 3}, {1, -2, 3, 0.5f, 0, -7});
  EXPECT_EQ(m.forward(x), x);
}

TEST(Forward, DenseRelu) {
  Model m;
  m.emplace<Dense>(2, 2, act("relu"));
  auto& d = static_cast<Dense&>(m.layer(0));
  const std::vector<float> eye = {1, 0, 0, 1};
  std::copy(eye.begin(), eye.end(), d.weights().begin());
  std::fill(d.bias().begin(), d.bias().end(), 0.0f);
  EXPECT_EQ(m.forward(Tensor({1, 2}, {-1, 2})), Tensor({1, 2}, {0, 2}));
}

TEST(Forward, LstmZeroWeightsGiveZeroHidden) {
  Lstm l(5, 4, {act("sigm"), act("tanh")});
  const Tensor out = l.forward(random_tensor({2, 3, 5}, 1));
  ASSERT_EQ(out.shape(), (Shape{2, 3, 4}));
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Forward, ShapeMismatchThrows) {
  Model m;
  m.emplace<Dense>(3, 2, act("sigm"));
  EXPECT_THROW(m.forward(Tensor({1, 4})), ConfigError);
}

TEST(Backward, IdentityLayerPassesWeightTranspose) {
  Dense d(3, 2, act("identity"));
  Rng rng(3);
  d.init(rng);
  const Tensor x = random_tensor({4, 3}, 4);
  d.forward(x);
  const Tensor g = random_tensor({4, 2}, 5);
  const Tensor gx = d.backward(g);
  ASSERT_EQ(gx.shape(), (Shape{4, 3}));
  for (std::size_t b = 0; b < 4; ++b)
    for (std::size_t i = 0; i < 3; ++i) {
      double e = 0;
      for (std::size_t j = 0; j < 2; ++j) e += g[b * 2 + j] * d.weights()[i * 2 + j];
      EXPECT_NEAR(gx[b * 3 + i], e, 1e-6);
    }
}

TEST(Backward, DenseMseFiniteDifference) {
  Model m;
  m.emplace<Dense>(3, 1, act("sigm"));  // 4 parameters
  m.init(7);
  const Tensor x = random_tensor({5, 3}, 8, -2, 2);
  const Tensor zero({5, 1});
  auto loss = [&](bool grad) {
    auto r = mse_loss(m.forward(x), zero);
    if (grad) m.backward(r.grad);
    return r.loss;
  };
  const auto r = check_parameter_gradients(m, loss, 1e-2);
  EXPECT_EQ(r.checked, 4u);
  EXPECT_LT(r.max_rel, 1e-3);
}

TEST(Backward, ConvNetFiniteDifference) {
  Model m;
  m.emplace<Conv2d>(1, 2, 3, act("tanh"));
  m.emplace<MaxPool2d>(2);
  m.emplace<Flatten>();
  m.emplace<Dense>(2 * 3 * 3, 3, act("identity"));
  m.init(9);
  const Tensor x = random_tensor({2, 1, 8, 8}, 10);
  const std::vector<int> labels = {0, 2};
  auto loss = [&](bool grad) {
    auto r = softmax_cross_entropy(m.forward(x), labels);
    if (grad) m.backward(r.grad);
    return r.loss;
  };
  EXPECT_LT(check_parameter_gradients(m, loss, 1e-2).max_rel, 1e-2);
}

TEST(Backward, LstmSingleStepFiniteDifference) {
  Model m;
  m.emplace<Lstm>(3, 8, LstmGateConfig{act("sigm"), act("tanh")});
  m.init(11);
  const Tensor x = random_tensor({2, 1, 3}, 12);
  const Tensor target = random_tensor({2, 1, 8}, 13, -0.5, 0.5);
  auto loss = [&](bool grad) {
    auto r = mse_loss(m.forward(x), target);
    if (grad) m.backward(r.grad);
    return r.loss;
  };
  const auto r = check_parameter_gradients(m, loss, 1e-2);
  EXPECT_EQ(r.checked, 3u * 32 + 8u * 32 + 32);
  EXPECT_LT(r.max_rel, 1e-3);
}

TEST(Backward, LstmStackBpttFiniteDifference) {
  Model m;
  m.emplace<Lstm>(4, 6, LstmGateConfig{act("sigm"), act("tanh")});
  m.emplace<Lstm>(6, 5, LstmGateConfig{act("sigm"), act("tanh")});
  m.emplace<Dense>(5, 4, act("identity"));
  m.init(14);
  const Tensor x = random_tensor({2, 6, 4}, 15);
  const std::vector<int> labels = {0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3};
  auto loss = [&](bool grad) {
    auto r = softmax_cross_entropy(m.forward(x), labels);
    if (grad) m.backward(r.grad);
    return r.loss;
  };
  EXPECT_LT(check_parameter_gradients(m, loss, 1e-2).max_rel, 1e-2);
}

TEST(Loss, Mse) {
  const auto r = mse_loss(Tensor({2, 2}, {1, 2, 3, 4}), Tensor({2, 2}, {1, 0, 3, 0}));
  EXPECT_DOUBLE_EQ(r.loss, (4.0 + 16.0) / 4);
  EXPECT_EQ(r.grad, Tensor({2, 2}, {0, 1, 0, 2}));
}

TEST(Loss, SoftmaxCrossEntropy) {
  const auto r = softmax_cross_entropy(Tensor({1, 3}, {0, 0, 0}), std::vector<int>{1});
  EXPECT_NEAR(r.loss, std::log(3.0), 1e-7);
  EXPECT_NEAR(r.grad[0], 1.0 / 3, 1e-7);
  EXPECT_NEAR(r.grad[1], 1.0 / 3 - 1, 1e-7);
  const auto big = softmax_cross_entropy(Tensor({1, 2}, {1000, -1000}), std::vector<int>{0});
  EXPECT_NEAR(big.loss, 0.0, 1e-12);
  EXPECT_THROW(softmax_cross_entropy(Tensor({1, 2}), std::vector<int>{2}), ConfigError);
}

TEST(Model, DivergenceNamesLayer) {
  Model m;
  m.emplace<Dense>(2, 3, act("sigm"));
  m.emplace<Dense>(3, 1, act("nan"));
  m.init(1);
  try {
    m.forward(Tensor({1, 2}, {0.5f, -0.5f}));
    FAIL() << "expected Divergence";
  } catch (const Divergence& d) {
    EXPECT_EQ(d.layer(), 1u);
    EXPECT_TRUE(d.is_nan());
    EXPECT_EQ(d.stage(), "forward");
  }
}

namespace {

class FixedSource final : public BatchSource {
 public:
  explicit FixedSource(std::vector<Batch> b) : batches_(std::move(b)) {}
  std::size_t batches_per_epoch() const override { return batches_.size(); }
  void start_epoch(std::size_t) override {}
  Batch batch(std::size_t i) const override { return batches_[i]; }

 private:
  std::vector<Batch> batches_;
};

FixedSource regression_source() {
  std::vector<Batch> b;
  for (int i = 0; i < 4; ++i) {
    Batch x;
    x.input = random_tensor({8, 4}, 100 + i);
    x.target = random_tensor({8, 2}, 200 + i, 0, 1);
    b.push_back(std::move(x));
  }
  return FixedSource(std::move(b));
}

Model small_model(const char* a) {
  Model m;
  m.emplace<Dense>(4, 6, act(a));
  m.emplace<Dense>(6, 2, act("identity"));
  m.init(3);
  return m;
}

}  // namespace

TEST(Train, ZeroLearningRateKeepsLoss) {
  for (auto opt : {OptimizerConfig::adam(0.0), OptimizerConfig::sgd(0.0)}) {
    Model m = small_model("sigm");
    auto src = regression_source();
    TrainConfig c;
    c.epochs = 1;
    c.optimizer = opt;
    c.record_initial_loss = true;
    const auto t = train(m, src, c);
    ASSERT_TRUE(t.initial_loss);
    EXPECT_EQ(t.final_loss, *t.initial_loss);
  }
}

TEST(Train, LearningReducesLoss) {
  Model m = small_model("tanh");
  auto src = regression_source();
  TrainConfig c;
  c.epochs = 20;
  c.optimizer = OptimizerConfig::adam(1e-2);
  c.record_initial_loss = true;
  const auto t = train(m, src, c);
  EXPECT_EQ(t.status, TrainStatus::converged);
  EXPECT_LT(t.final_loss, *t.initial_loss * 0.5);
  ASSERT_EQ(t.epochs.size(), 20u);
  EXPECT_EQ(t.epochs.back().epoch, 20u);
  EXPECT_EQ(t.final_loss, t.epochs.back().loss);
}

TEST(Train, Deterministic) {
  std::vector<double> runs[2];
  for (auto& r : runs) {
    Model m = small_model("sigm_fastexp_512");
    auto src = regression_source();
    TrainConfig c;
    c.epochs = 5;
    for (const auto& e : train(m, src, c).epochs) r.push_back(e.loss);
  }
  EXPECT_EQ(runs[0], runs[1]);
}

TEST(Train, NanActivationReportsLayer) {
  Model m;
  m.emplace<Dense>(4, 6, act("sigm"));
  m.emplace<Dense>(6, 2, act("nan"));
  m.init(1);
  auto src = regression_source();
  TrainConfig c;
  const auto t = train(m, src, c);
  EXPECT_EQ(t.status, TrainStatus::nan);
  ASSERT_TRUE(t.divergence_layer);
  EXPECT_EQ(*t.divergence_layer, 1u);
  EXPECT_EQ(t.divergence_stage, "forward");
}

TEST(Train, ExplodingLossIsDiverged) {
  Model m = small_model("identity");
  auto src = regression_source();
  TrainConfig c;
  c.epochs = 50;
  c.optimizer = OptimizerConfig::sgd(50.0);
  const auto t = train(m, src, c);
  EXPECT_EQ(t.status, TrainStatus::diverged);
}

TEST(Train, RejectsBadConfig) {
  TrainConfig c;
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.epochs = 1;
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Infer, Stats) {
  Model m = small_model("sigm");
  const Tensor x = random_tensor({1, 4}, 1);
  const auto zero = infer_benchmark(m, x, 0);
  EXPECT_EQ(zero.repeat, 0u);
  EXPECT_EQ(zero.total_seconds, 0.0);
  EXPECT_TRUE(zero.samples.empty());

  auto w = prepare_workload(WorkloadId::charrnn, {act("sigm"), act("tanh")}, {});
  const auto s = infer_benchmark(w.model, w.single_input, 1000);
  EXPECT_EQ(s.samples.size(), 1000u);
  EXPECT_GT(s.mean_seconds(), 0.0);
  EXPECT_LE(s.min_seconds(), s.mean_seconds());
}

TEST(Workloads, SlotValidation) {
  using S = SlotAssignment;
  EXPECT_NO_THROW((S{act("sigm"), std::nullopt}.validate(WorkloadId::convnet)));
  EXPECT_NO_THROW((S{std::nullopt, act("serp")}.validate(WorkloadId::convnet)));
  EXPECT_NO_THROW((S{act("relu"), std::nullopt}.validate(WorkloadId::autoencoder)));
  EXPECT_THROW((S{act("sigm"), act("serp")}.validate(WorkloadId::convnet)), ConfigError);
  EXPECT_THROW((S{act("serp"), std::nullopt}.validate(WorkloadId::convnet)), ConfigError);
  EXPECT_THROW((S{}.validate(WorkloadId::autoencoder)), ConfigError);
  EXPECT_THROW((S{act("sigm"), std::nullopt}.validate(WorkloadId::charrnn)), ConfigError);
  EXPECT_NO_THROW((S{act("sigm"), act("serp_clamp")}.validate(WorkloadId::charrnn)));
  EXPECT_THROW((S{act("tanh"), act("tanh")}.validate(WorkloadId::charrnn)), ConfigError);
  EXPECT_THROW(parse_workload("mlp"), ConfigError);
}

TEST(Workloads, Architectures) {
  EXPECT_EQ(build_convnet(act("sigm")).parameter_count(), 8u * 9 + 8 + 1352 * 128 + 128 + 128 * 10 + 10);
  EXPECT_EQ(build_autoencoder(act("sigm"), false).parameter_count(), 784u * 32 + 32 + 32 * 784 + 784);
  const std::size_t v = 30, h = 64;
  EXPECT_EQ(build_charrnn(v, h, act("sigm"), act("tanh")).parameter_count(),
            (v + h + 1) * 4 * h + (h + h + 1) * 4 * h + h * v + v);
}

TEST(Workloads, CharRnnGateAccounting) {
  WorkloadOptions o;
  o.epochs = 1;
  o.limit = 2000;
  auto w = prepare_workload(WorkloadId::charrnn, {act("sigm"), act("serp_clamp")}, o);
  const auto t = train(w.model, *w.source, w.config);
  EXPECT_EQ(t.status, TrainStatus::converged);
  const auto& c = t.counters;
  ASSERT_GT(c.hidden_steps, 0u);
  EXPECT_EQ(c.sigm_slot, 3 * c.hidden_steps);
  EXPECT_EQ(c.tanh_slot, 2 * c.hidden_steps);
  const std::size_t sequences = (2000 - 1) / 50;
  EXPECT_EQ(c.hidden_steps, 2 * 64 * 50 * sequences);  // two layers, every unit and step
}

TEST(Workloads, AutoencoderLossTrendsDown) {
  auto w = prepare_workload(WorkloadId::autoencoder, {act("sigm"), std::nullopt}, {});
  const auto t = train(w.model, *w.source, w.config);
  ASSERT_EQ(t.status, TrainStatus::converged);
  ASSERT_EQ(t.epochs.size(), 10u);
  int rises = 0;
  for (std::size_t i = 1; i < t.epochs.size(); ++i) rises += t.epochs[i].loss > t.epochs[i - 1].loss;
  EXPECT_LE(rises, 2);
}

TEST(Workloads, SameOutputsSameTrace) {
  // relu and its branch-free form agree everywhere, so training must too.
  WorkloadOptions o;
  o.epochs = 1;
  o.limit = 256;
  std::vector<double> losses[2];
  const char* names[2] = {"relu", "relu_sum"};
  for (int k = 0; k < 2; ++k) {
    auto w = prepare_workload(WorkloadId::convnet, {act(names[k]), std::nullopt}, o);
    for (const auto& e : train(w.model, *w.source, w.config).epochs) losses[k].push_back(e.loss);
  }
  EXPECT_EQ(losses[0], losses[1]);
}
