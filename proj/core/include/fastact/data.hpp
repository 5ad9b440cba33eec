#pragma once

// Datasets for the three workloads: MNIST-style images in IDX format, plain
// text corpora, and deterministic synthetic stand-ins for offline runs.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fastact::data {

/// Images with labels; pixels normalized to [0, 1], row-major per image.
struct ImageDataset {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> pixels;
  std::vector<std::uint8_t> labels;

  std::size_t image_size() const noexcept { return rows * cols; }
  std::span<const float> image(std::size_t i) const {
    return std::span<const float>(pixels).subspan(i * image_size(), image_size());
  }
  friend bool operator==(const ImageDataset&, const ImageDataset&) = default;
};

/// Byte stream with a dense vocabulary sorted by byte value.
struct TextDataset {
  std::vector<int> stream;
  std::vector<unsigned char> vocab;  ///< index -> byte

  std::size_t vocab_size() const noexcept { return vocab.size(); }
  /// -1 if the byte is not in the vocabulary.
  int index_of(unsigned char c) const noexcept;
  friend bool operator==(const TextDataset&, const TextDataset&) = default;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Throws DataError on bad magic, truncated payload, or count mismatch.
ImageDataset load_mnist_idx(const std::filesystem::path& images,
                            const std::filesystem::path& labels,
                            std::optional<std::size_t> limit = std::nullopt);

/// Looks for the standard MNIST training file names in `dir`.
ImageDataset load_mnist_dir(const std::filesystem::path& dir,
                            std::optional<std::size_t> limit = std::nullopt);

/// Throws DataError for an empty or unreadable file.
TextDataset load_text_corpus(const std::filesystem::path& path,
                             std::optional<std::size_t> limit_chars = std::nullopt);
TextDataset text_from_string(std::string_view text,
                             std::optional<std::size_t> limit_chars = std::nullopt);

/// 28x28 images of ten classes, each class a fixed arrangement of strokes,
/// jittered per image. Same seed, same dataset.
ImageDataset synthetic_mnist(std::uint64_t seed, std::size_t n);

/// Text sampled from a fixed sparse first-order Markov chain over lowercase
/// letters, space and period.
TextDataset synthetic_text(std::uint64_t seed, std::size_t n);

/// Shuffled index order for one epoch, a pure function of (n, seed, epoch).
std::vector<std::size_t> batch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

/// Encoding helpers for writing IDX files (tests, tooling).
std::vector<std::uint8_t> encode_idx_images(const ImageDataset& ds);
std::vector<std::uint8_t> encode_idx_labels(const ImageDataset& ds);

}  // namespace fastact::data
