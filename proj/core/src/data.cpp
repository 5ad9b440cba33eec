#include "fastact/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "fastact/error.hpp"
#include "fastact/random.hpp"

namespace fastact::data {
namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset,
                        const std::filesystem::path& path) {
  if (buf.size() < offset + 4) throw DataError("'" + path.string() + "': truncated header");
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

// Seed for the class prototypes; independent of the dataset seed so every
// synthetic dataset shares the same classes.
constexpr std::uint64_t kPrototypeSeed = 0x5eed'c1a5'5e5ULL;

struct Segment {
  double x0, y0, x1, y1;
};

double segment_distance2(const Segment& s, double px, double py) {
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = s.x0 + t * dx - px, ey = s.y0 + t * dy - py;
  return ex * ex + ey * ey;
}

}  // namespace

int TextDataset::index_of(unsigned char c) const noexcept {
  auto it = std::lower_bound(vocab.begin(), vocab.end(), c);
  if (it == vocab.end() || *it != c) return -1;
  return static_cast<int>(it - vocab.begin());
}

ImageDataset load_mnist_idx(const std::filesystem::path& images_path,
                            const std::filesystem::path& labels_path,
                            std::optional<std::size_t> limit) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);

  if (auto magic = read_be32(images, 0, images_path); magic != kIdxImagesMagic)
    throw DataError("'" + images_path.string() + "': bad magic " + hex(magic) + ", expected " +
                    hex(kIdxImagesMagic));
  if (auto magic = read_be32(labels, 0, labels_path); magic != kIdxLabelsMagic)
    throw DataError("'" + labels_path.string() + "': bad magic " + hex(magic) + ", expected " +
                    hex(kIdxLabelsMagic));

  const std::size_t n_images = read_be32(images, 4, images_path);
  const std::size_t rows = read_be32(images, 8, images_path);
  const std::size_t cols = read_be32(images, 12, images_path);
  const std::size_t n_labels = read_be32(labels, 4, labels_path);
  if (n_images != n_labels)
    throw DataError("count mismatch: " + std::to_string(n_images) + " images vs " +
                    std::to_string(n_labels) + " labels");
  if (images.size() < 16 + n_images * rows * cols)
    throw DataError("'" + images_path.string() + "': truncated payload");
  if (labels.size() < 8 + n_labels) throw DataError("'" + labels_path.string() + "': truncated payload");

  ImageDataset ds;
  ds.count = limit ? std::min(*limit, n_images) : n_images;
  ds.rows = rows;
  ds.cols = cols;
  ds.pixels.resize(ds.count * rows * cols);
  for (std::size_t i = 0; i < ds.pixels.size(); ++i)
    ds.pixels[i] = static_cast<float>(images[16 + i]) / 255.0f;
  ds.labels.assign(labels.begin() + 8, labels.begin() + 8 + static_cast<std::ptrdiff_t>(ds.count));
  for (auto l : ds.labels)
    if (l > 9) throw DataError("label " + std::to_string(l) + " out of range [0, 9]");
  return ds;
}

ImageDataset load_mnist_dir(const std::filesystem::path& dir, std::optional<std::size_t> limit) {
  for (auto [img, lbl] : {std::pair{"train-images-idx3-ubyte", "train-labels-idx1-ubyte"},
                          std::pair{"train-images.idx3-ubyte", "train-labels.idx1-ubyte"}}) {
    if (std::filesystem::exists(dir / img) && std::filesystem::exists(dir / lbl))
      return load_mnist_idx(dir / img, dir / lbl, limit);
  }
  throw DataError("no MNIST training files (train-images-idx3-ubyte, train-labels-idx1-ubyte) in '" +
                  dir.string() + "'");
}

TextDataset text_from_string(std::string_view text, std::optional<std::size_t> limit_chars) {
  if (limit_chars) text = text.substr(0, *limit_chars);
  if (text.empty()) throw DataError("text corpus is empty");
  std::array<bool, 256> present{};
  for (char c : text) present[static_cast<unsigned char>(c)] = true;
  TextDataset ds;
  for (int c = 0; c < 256; ++c)
    if (present[static_cast<std::size_t>(c)]) ds.vocab.push_back(static_cast<unsigned char>(c));
  ds.stream.reserve(text.size());
  for (char c : text) ds.stream.push_back(ds.index_of(static_cast<unsigned char>(c)));
  return ds;
}

TextDataset load_text_corpus(const std::filesystem::path& path, std::optional<std::size_t> limit_chars) {
  const auto bytes = read_file(path);
  if (bytes.empty()) throw DataError("'" + path.string() + "' is empty");
  return text_from_string(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), limit_chars);
}

ImageDataset synthetic_mnist(std::uint64_t seed, std::size_t n) {
  if (n == 0) throw ConfigError("synthetic dataset size must be >= 1");
  constexpr std::size_t kSide = 28;
  constexpr int kClasses = 10, kStrokes = 3;

  std::array<std::array<Segment, kStrokes>, kClasses> prototypes{};
  Rng proto(kPrototypeSeed);
  for (auto& cls : prototypes)
    for (auto& s : cls) s = {proto.uniform(6, 22), proto.uniform(6, 22), proto.uniform(6, 22), proto.uniform(6, 22)};

  ImageDataset ds;
  ds.count = n;
  ds.rows = ds.cols = kSide;
  ds.pixels.resize(n * kSide * kSide);
  ds.labels.resize(n);
  Rng rng(seed);
  constexpr double kInvTwoSigma2 = 1.0 / (2.0 * 1.2 * 1.2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<std::uint8_t>(rng.below(kClasses));
    ds.labels[i] = label;
    const double dx = rng.uniform(-2, 2), dy = rng.uniform(-2, 2);
    const double gain = rng.uniform(0.7, 1.0);
    float* img = ds.pixels.data() + i * kSide * kSide;
    for (std::size_t r = 0; r < kSide; ++r) {
      for (std::size_t c = 0; c < kSide; ++c) {
        const double px = static_cast<double>(c) - dx, py = static_cast<double>(r) - dy;
        double d2 = 1e300;
        for (const auto& s : prototypes[label]) d2 = std::min(d2, segment_distance2(s, px, py));
        const double v = gain * std::exp(-d2 * kInvTwoSigma2) + rng.uniform(-0.05, 0.05);
        img[r * kSide + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return ds;
}

TextDataset synthetic_text(std::uint64_t seed, std::size_t n) {
  if (n == 0) throw ConfigError("synthetic text length must be >= 1");
  static constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz .";
  constexpr std::size_t kSuccessors = 4;
  constexpr std::array<double, kSuccessors> kWeights = {0.55, 0.25, 0.15, 0.05};

  std::array<std::array<std::size_t, kSuccessors>, kAlphabet.size()> next{};
  Rng proto(kPrototypeSeed ^ 0x7e47ULL);
  for (auto& row : next)
    for (auto& s : row) s = proto.below(kAlphabet.size());

  Rng rng(seed);
  std::string text;
  text.reserve(n);
  std::size_t state = rng.below(kAlphabet.size());
  for (std::size_t i = 0; i < n; ++i) {
    text.push_back(kAlphabet[state]);
    double u = rng.uniform01();
    std::size_t k = 0;
    while (k + 1 < kSuccessors && u >= kWeights[k]) u -= kWeights[k++];
    state = next[state][k];
  }
  return text_from_string(text);
}

std::vector<std::size_t> batch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + epoch + 1);
  rng.shuffle(order);
  return order;
}

std::vector<std::uint8_t> encode_idx_images(const ImageDataset& ds) {
  std::vector<std::uint8_t> out;
  put_be32(out, kIdxImagesMagic);
  put_be32(out, static_cast<std::uint32_t>(ds.count));
  put_be32(out, static_cast<std::uint32_t>(ds.rows));
  put_be32(out, static_cast<std::uint32_t>(ds.cols));
  for (float p : ds.pixels) out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(p, 0.0f, 1.0f) * 255.0f)));
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(const ImageDataset& ds) {
  std::vector<std::uint8_t> out;
  put_be32(out, kIdxLabelsMagic);
  put_be32(out, static_cast<std::uint32_t>(ds.count));
  out.insert(out.end(), ds.labels.begin(), ds.labels.end());
  return out;
}

}  // namespace fastact::data
