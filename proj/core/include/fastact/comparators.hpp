#pragma once

// Reimplementations of two third-party sigmoid approximations:
//  - Theano's ultra_fast_sigmoid (piecewise rational/linear/constant)
//  - the Word2Vec lookup-table sigmoid

#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

namespace fastact {

/// Constants from Theano's scalar ultra_fast_sigmoid C implementation
/// (theano/tensor/nnet/sigm.py). The input is halved, z(u) approximates
/// tanh(u) on |u| and the result is 0.5 * (z + 1). The rational piece ends
/// at 0.9444 and the linear piece starts at 0.9354, so the function steps
/// down by about 0.0045 at x = +-3.4.
namespace ultra_fast_constants {
inline constexpr double kRationalEnd = 1.7;         ///< |u| < 1.7: z = 1.5|u| / (1 + |u|)
inline constexpr double kLinearEnd = 3.0;           ///< |u| < 3:   z = a + b (|u| - 1.7)
inline constexpr double kLinearOffset = 0.935409070603099;
inline constexpr double kLinearSlope = 0.0458812946797165;
inline constexpr double kPlateau = 0.99505475368673;  ///< |u| >= 3
}  // namespace ultra_fast_constants

template <std::floating_point T>
constexpr T ultra_fast_sigmoid(T x) noexcept {
  namespace k = ultra_fast_constants;
  const T u = T(0.5) * x;
  const T a = u < T(0) ? -u : u;
  T z;
  if (a < T(k::kRationalEnd))
    z = T(1.5) * a / (T(1) + a);
  else if (a < T(k::kLinearEnd))
    z = T(k::kLinearOffset) + T(k::kLinearSlope) * (a - T(k::kRationalEnd));
  else
    z = T(k::kPlateau);
  if (u < T(0)) z = -z;
  return T(0.5) * (z + T(1));
}

/// Piecewise analytic derivative; breakpoints (x = +-3.4, +-6) take the
/// right-hand segment.
template <std::floating_point T>
constexpr T ultra_fast_sigmoid_derivative(T x) noexcept {
  namespace k = ultra_fast_constants;
  const T u = T(0.5) * x;
  const T a = u < T(0) ? -u : u;
  // Moving right from a negative breakpoint enters the inner segment.
  const bool inner_rational = u < T(0) ? a <= T(k::kRationalEnd) : a < T(k::kRationalEnd);
  const bool inner_linear = u < T(0) ? a <= T(k::kLinearEnd) : a < T(k::kLinearEnd);
  T dz;
  if (inner_rational) {
    const T d = T(1) + a;
    dz = T(1.5) / (d * d);
  } else if (inner_linear) {
    dz = T(k::kLinearSlope);
  } else {
    dz = T(0);
  }
  return T(0.25) * dz;  // d/dx [0.5 (z(x/2) + 1)]
}

inline constexpr std::size_t kDefaultTableSize = 1000;
inline constexpr double kDefaultMaxExp = 6.0;

/// Where each bucket samples the exact sigmoid.
enum class TableSampling {
  left_edge,  ///< bucket i at (2i/size - 1) max_exp, as in word2vec.c
  midpoint,   ///< bucket centre
};

/// Precomputed sigmoid table; inputs outside [-max_exp, max_exp) clamp to 0/1.
class LookupTable {
 public:
  LookupTable(std::vector<double> values, double max_exp);

  std::size_t size() const noexcept { return values_.size(); }
  double max_exp() const noexcept { return max_exp_; }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Inputs where the output steps: -max_exp + i * 2 max_exp / size, i = 0..size.
  std::vector<double> step_edges() const;

  template <std::floating_point T>
  T lookup(T x) const noexcept {
    const T t = (x + T(max_exp_)) * T(scale_);
    if (!(t >= T(0))) return T(0);
    if (t >= T(values_.size())) return T(1);
    auto index = static_cast<std::size_t>(t);
    if (index >= values_.size()) index = values_.size() - 1;  // f32 rounding at the top edge
    if constexpr (std::same_as<T, float>)
      return values_f32_[index];
    else
      return T(values_[index]);
  }

 private:
  std::vector<double> values_;
  std::vector<float> values_f32_;
  double max_exp_;
  double scale_;  ///< size / (2 max_exp)
};

/// Throws ConfigError unless table_size >= 2 and max_exp > 0.
LookupTable build_w2v_table(std::size_t table_size = kDefaultTableSize,
                            double max_exp = kDefaultMaxExp,
                            TableSampling sampling = TableSampling::left_edge);

template <std::floating_point T>
T w2v_sigmoid(T x, const LookupTable& table) noexcept {
  return table.lookup(x);
}

/// The table is piecewise constant, so its derivative is zero away from the
/// bucket edges (right-hand value at an edge). Gradients do not flow through
/// the lookup.
template <std::floating_point T>
constexpr T w2v_sigmoid_derivative(T, const LookupTable&) noexcept {
  return T(0);
}

}  // namespace fastact
