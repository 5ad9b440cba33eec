#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "fastact/activation.hpp"
#include "fastact/data.hpp"
#include "fastact/nn/train.hpp"

namespace fastact::nn {

/// The three benchmark networks:
///  - convnet: conv(1->8, 3x3, act) -> maxpool(2) -> dense(1352->128, act) -> dense(128->10), softmax CE
///  - autoencoder: dense(784->32, act) -> dense(32->784, act or identity), MSE
///  - charrnn: one-hot -> lstm(64) -> lstm(64) -> dense(vocab), softmax CE over 50-step sequences
enum class WorkloadId { convnet, autoencoder, charrnn };

std::string to_string(WorkloadId id);
WorkloadId parse_workload(std::string_view name);  ///< throws ConfigError

std::size_t default_epochs(WorkloadId id);

/// Activation per slot. convnet and autoencoder take exactly one slot;
/// charrnn takes both (gate sigmoid and cell tanh).
struct SlotAssignment {
  std::optional<ActivationSpec> sigm;
  std::optional<ActivationSpec> tanh;

  /// Throws ConfigError on a missing/extra slot or a family that does not
  /// fit the slot (relu, identity and custom entries fit either).
  void validate(WorkloadId id) const;
  /// The single active slot for one-slot workloads.
  const ActivationSpec& single() const;
};

struct WorkloadOptions {
  std::size_t epochs = 0;  ///< 0: default_epochs()
  std::size_t batch_size = 64;
  std::uint64_t seed = 1;
  /// MNIST directory (convnet, autoencoder) or text file (charrnn);
  /// nullopt selects the synthetic generator.
  std::optional<std::filesystem::path> data_path;
  /// Images, or characters for charrnn; nullopt: the synthetic default size
  /// or the whole file.
  std::optional<std::size_t> limit;
  bool autoencoder_output_activation = true;
  std::size_t seq_len = 50;
  std::size_t hidden = 64;
};

std::size_t default_synthetic_size(WorkloadId id);

struct PreparedWorkload {
  WorkloadId id;
  Model model;
  std::unique_ptr<BatchSource> source;
  TrainConfig config;
  Tensor single_input;  ///< one example, for inference timing
};

/// Loads or generates the data, builds and initializes the model.
PreparedWorkload prepare_workload(WorkloadId id, const SlotAssignment& slots,
                                  const WorkloadOptions& options);

Model build_convnet(const ActivationSpec& act);
Model build_autoencoder(const ActivationSpec& act, bool output_activation);
Model build_charrnn(std::size_t vocab, std::size_t hidden, const ActivationSpec& sigm,
                    const ActivationSpec& tanh);

std::unique_ptr<BatchSource> image_classifier_source(std::shared_ptr<const data::ImageDataset> ds,
                                                     std::size_t batch_size, std::uint64_t seed);
std::unique_ptr<BatchSource> image_autoencoder_source(std::shared_ptr<const data::ImageDataset> ds,
                                                      std::size_t batch_size, std::uint64_t seed);
std::unique_ptr<BatchSource> sequence_source(std::shared_ptr<const data::TextDataset> ds,
                                             std::size_t seq_len, std::size_t batch_size,
                                             std::uint64_t seed);

}  // namespace fastact::nn
