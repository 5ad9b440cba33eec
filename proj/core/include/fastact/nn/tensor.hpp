#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "fastact/error.hpp"

namespace fastact::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

enum class Finiteness { finite, has_nan, has_inf };

/// Dense row-major f32 tensor.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f)
      : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}
  Tensor(Shape shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_size(shape_) != data_.size()) throw ConfigError("tensor shape does not match data size");
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  float* ptr() noexcept { return data_.data(); }
  const float* ptr() const noexcept { return data_.data(); }
  float& operator[](std::size_t i) noexcept { return data_[i]; }
  float operator[](std::size_t i) const noexcept { return data_[i]; }

  void reshape(Shape shape) {
    if (shape_size(shape) != data_.size()) throw ConfigError("reshape changes element count");
    shape_ = std::move(shape);
  }
  void fill(float v) { std::fill(data_.begin(), data_.end(), v); }

  Finiteness finiteness() const noexcept {
    bool inf = false;
    for (float v : data_) {
      if (std::isnan(v)) return Finiteness::has_nan;
      if (std::isinf(v)) inf = true;
    }
    return inf ? Finiteness::has_inf : Finiteness::finite;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

}  // namespace fastact::nn
