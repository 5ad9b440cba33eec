#include "fastact/nn/workloads.hpp"

#include <algorithm>

#include "fastact/nn/lstm.hpp"

namespace fastact::nn {
namespace {

constexpr std::uint64_t kDataSeedSalt = 0xda7a'5eedULL;

bool fits_slot(Family f, Family slot) {
  return f == slot || f == Family::relu || f == Family::identity || f == Family::any;
}

class ImageSource final : public BatchSource {
 public:
  ImageSource(std::shared_ptr<const data::ImageDataset> ds, std::size_t batch, std::uint64_t seed,
              bool autoencode)
      : ds_(std::move(ds)), batch_(batch), seed_(seed), autoencode_(autoencode) {
    if (ds_->count == 0) throw ConfigError("image dataset is empty");
  }

  std::size_t batches_per_epoch() const override { return (ds_->count + batch_ - 1) / batch_; }
  void start_epoch(std::size_t epoch) override { order_ = data::batch_order(ds_->count, seed_, epoch); }

  Batch batch(std::size_t index) const override {
    const std::size_t begin = index * batch_;
    const std::size_t n = std::min(batch_, ds_->count - begin);
    const std::size_t px = ds_->image_size();
    Batch b;
    b.input = autoencode_ ? Tensor({n, px}) : Tensor({n, 1, ds_->rows, ds_->cols});
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t item = order_[begin + i];
      std::ranges::copy(ds_->image(item), b.input.ptr() + i * px);
      if (!autoencode_) b.labels.push_back(ds_->labels[item]);
    }
    if (autoencode_) b.target = b.input;
    return b;
  }

 private:
  std::shared_ptr<const data::ImageDataset> ds_;
  std::size_t batch_;
  std::uint64_t seed_;
  bool autoencode_;
  std::vector<std::size_t> order_;
};

/// Non-overlapping windows of seq_len + 1 characters; the model reads the
/// first seq_len and predicts each next character.
class SequenceSource final : public BatchSource {
 public:
  SequenceSource(std::shared_ptr<const data::TextDataset> ds, std::size_t seq_len, std::size_t batch,
                 std::uint64_t seed)
      : ds_(std::move(ds)), len_(seq_len), batch_(batch), seed_(seed) {
    if (len_ == 0) throw ConfigError("sequence length must be >= 1");
    windows_ = (ds_->stream.size() - 1) / len_;
    if (windows_ == 0)
      throw ConfigError("text corpus shorter than one sequence of " + std::to_string(len_ + 1) + " characters");
  }

  std::size_t batches_per_epoch() const override { return (windows_ + batch_ - 1) / batch_; }
  void start_epoch(std::size_t epoch) override { order_ = data::batch_order(windows_, seed_, epoch); }

  Batch batch(std::size_t index) const override {
    const std::size_t begin = index * batch_;
    const std::size_t n = std::min(batch_, windows_ - begin);
    const std::size_t v = ds_->vocab_size();
    Batch b;
    b.input = Tensor({n, len_, v});
    b.labels.reserve(n * len_);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t start = order_[begin + i] * len_;
      for (std::size_t t = 0; t < len_; ++t) {
        b.input[(i * len_ + t) * v + static_cast<std::size_t>(ds_->stream[start + t])] = 1.0f;
        b.labels.push_back(ds_->stream[start + t + 1]);
      }
    }
    return b;
  }

 private:
  std::shared_ptr<const data::TextDataset> ds_;
  std::size_t len_, batch_;
  std::uint64_t seed_;
  std::size_t windows_;
  std::vector<std::size_t> order_;
};

}  // namespace

std::string to_string(WorkloadId id) {
  switch (id) {
    case WorkloadId::convnet: return "convnet";
    case WorkloadId::autoencoder: return "autoencoder";
    case WorkloadId::charrnn: return "charrnn";
  }
  return "?";
}

WorkloadId parse_workload(std::string_view name) {
  for (auto id : {WorkloadId::convnet, WorkloadId::autoencoder, WorkloadId::charrnn})
    if (name == to_string(id)) return id;
  throw ConfigError("unknown workload '" + std::string(name) + "' (expected convnet, autoencoder or charrnn)");
}

std::size_t default_epochs(WorkloadId id) {
  switch (id) {
    case WorkloadId::convnet: return 5;
    case WorkloadId::autoencoder: return 10;
    case WorkloadId::charrnn: return 3;
  }
  return 1;
}

std::size_t default_synthetic_size(WorkloadId id) {
  switch (id) {
    case WorkloadId::convnet: return 2000;
    case WorkloadId::autoencoder: return 5000;
    case WorkloadId::charrnn: return 20000;
  }
  return 0;
}

void SlotAssignment::validate(WorkloadId id) const {
  const std::string w = to_string(id);
  if (id == WorkloadId::charrnn) {
    if (!sigm || !tanh) throw ConfigError("charrnn needs both --sigm and --tanh");
  } else {
    if (sigm && tanh) throw ConfigError(w + " has a single activation slot; pass --sigm or --tanh, not both");
    if (!sigm && !tanh) throw ConfigError(w + " needs an activation (--sigm or --tanh)");
  }
  if (sigm && !fits_slot(sigm->family(), Family::sigmoid))
    throw ConfigError("'" + sigm->name() + "' is a " + std::string(fastact::to_string(sigm->family())) +
                      " function and cannot fill the sigmoid slot");
  if (tanh && !fits_slot(tanh->family(), Family::tanh))
    throw ConfigError("'" + tanh->name() + "' is a " + std::string(fastact::to_string(tanh->family())) +
                      " function and cannot fill the tanh slot");
}

const ActivationSpec& SlotAssignment::single() const {
  if (sigm) return *sigm;
  if (tanh) return *tanh;
  throw ConfigError("no activation assigned");
}

Model build_convnet(const ActivationSpec& act) {
  Model m;
  m.emplace<Conv2d>(1, 8, 3, act)
      .emplace<MaxPool2d>(2)
      .emplace<Flatten>()
      .emplace<Dense>(8 * 13 * 13, 128, act)
      .emplace<Dense>(128, 10, ActivationSpec::exact(ExactFunction::identity));
  return m;
}

Model build_autoencoder(const ActivationSpec& act, bool output_activation) {
  Model m;
  m.emplace<Dense>(784, 32, act)
      .emplace<Dense>(32, 784, output_activation ? act : ActivationSpec::exact(ExactFunction::identity));
  return m;
}

Model build_charrnn(std::size_t vocab, std::size_t hidden, const ActivationSpec& sigm,
                    const ActivationSpec& tanh) {
  Model m;
  m.emplace<Lstm>(vocab, hidden, LstmGateConfig{sigm, tanh})
      .emplace<Lstm>(hidden, hidden, LstmGateConfig{sigm, tanh})
      .emplace<Dense>(hidden, vocab, ActivationSpec::exact(ExactFunction::identity));
  return m;
}

std::unique_ptr<BatchSource> image_classifier_source(std::shared_ptr<const data::ImageDataset> ds,
                                                     std::size_t batch_size, std::uint64_t seed) {
  return std::make_unique<ImageSource>(std::move(ds), batch_size, seed, false);
}

std::unique_ptr<BatchSource> image_autoencoder_source(std::shared_ptr<const data::ImageDataset> ds,
                                                      std::size_t batch_size, std::uint64_t seed) {
  return std::make_unique<ImageSource>(std::move(ds), batch_size, seed, true);
}

std::unique_ptr<BatchSource> sequence_source(std::shared_ptr<const data::TextDataset> ds,
                                             std::size_t seq_len, std::size_t batch_size,
                                             std::uint64_t seed) {
  return std::make_unique<SequenceSource>(std::move(ds), seq_len, batch_size, seed);
}

PreparedWorkload prepare_workload(WorkloadId id, const SlotAssignment& slots,
                                  const WorkloadOptions& options) {
  slots.validate(id);
  if (options.batch_size == 0) throw ConfigError("batch size must be >= 1");

  PreparedWorkload w{id, Model{}, nullptr, TrainConfig{}, Tensor{}};
  w.config.epochs = options.epochs ? options.epochs : default_epochs(id);
  w.config.batch_size = options.batch_size;
  w.config.seed = options.seed;
  w.config.optimizer = OptimizerConfig::adam();
  const std::uint64_t data_seed = options.seed ^ kDataSeedSalt;

  if (id == WorkloadId::charrnn) {
    auto text = std::make_shared<const data::TextDataset>(
        options.data_path ? data::load_text_corpus(*options.data_path, options.limit)
                          : data::synthetic_text(data_seed, options.limit.value_or(default_synthetic_size(id))));
    w.model = build_charrnn(text->vocab_size(), options.hidden, *slots.sigm, *slots.tanh);
    w.config.loss = LossKind::cross_entropy;
    w.source = sequence_source(text, options.seq_len, options.batch_size, options.seed);
  } else {
    auto images = std::make_shared<const data::ImageDataset>(
        options.data_path ? data::load_mnist_dir(*options.data_path, options.limit)
                          : data::synthetic_mnist(data_seed, options.limit.value_or(default_synthetic_size(id))));
    if (images->rows != 28 || images->cols != 28) throw DataError("expected 28x28 images");
    if (id == WorkloadId::convnet) {
      w.model = build_convnet(slots.single());
      w.config.loss = LossKind::cross_entropy;
      w.source = image_classifier_source(images, options.batch_size, options.seed);
    } else {
      w.model = build_autoencoder(slots.single(), options.autoencoder_output_activation);
      w.config.loss = LossKind::mse;
      w.source = image_autoencoder_source(images, options.batch_size, options.seed);
    }
  }
  w.model.init(options.seed);

  w.source->start_epoch(0);
  Batch first = w.source->batch(0);
  Shape one = first.input.shape();
  const std::size_t per_item = first.input.size() / one[0];
  one[0] = 1;
  w.single_input = Tensor(one, std::vector<float>(first.input.ptr(), first.input.ptr() + per_item));
  return w;
}

}  // namespace fastact::nn
