#pragma once

// Scalar activation functions and their analytic derivatives.
//
// Everything here is header-only and templated on the floating-point type so
// the same code serves the f64 fitting/oracle path and the f32 training path.

#include <bit>
#include <cmath>
#include <concepts>
#include <span>

#include "fastact/error.hpp"

namespace fastact {

// ---------------------------------------------------------------------------
// Exact baselines

template <std::floating_point T>
constexpr T relu_exact(T x) noexcept {
  return x > T(0) ? x : T(0);
}

template <std::floating_point T>
constexpr T relu_exact_derivative(T x) noexcept {
  return x >= T(0) ? T(1) : T(0);  // right-hand derivative at 0
}

/// Branch-free ReLU: (x + |x|) / 2.
template <std::floating_point T>
constexpr T relu_sum(T x) noexcept {
  return (x + std::abs(x)) * T(0.5);
}

template <std::floating_point T>
T sigm_exact(T x) noexcept {
  return T(1) / (T(1) + std::exp(-x));
}

template <std::floating_point T>
T sigm_exact_derivative(T x) noexcept {
  const T s = sigm_exact(x);
  return s * (T(1) - s);
}

template <std::floating_point T>
T tanh_exact(T x) noexcept {
  return std::tanh(x);
}

template <std::floating_point T>
T tanh_exact_derivative(T x) noexcept {
  const T t = std::tanh(x);
  return T(1) - t * t;
}

// ---------------------------------------------------------------------------
// Lambert continued fraction for tanh:
//   x / (1 + x^2 / (3 + x^2 / (5 + ...)))
// truncated after `depth` partial denominators and evaluated bottom-up.

template <std::floating_point T>
T tanh_cont(T x, int depth) {
  if (depth < 1) throw ConfigError("continued fraction depth must be >= 1");
  const T x2 = x * x;
  T r = T(2 * depth - 1);
  for (int i = depth - 1; i >= 1; --i) {
    if (r == T(0)) throw EvaluationSingularity(static_cast<double>(x));
    r = T(2 * i - 1) + x2 / r;
  }
  if (r == T(0)) throw EvaluationSingularity(static_cast<double>(x));
  return x / r;
}

/// Forward-mode derivative of the same recurrence.
template <std::floating_point T>
T tanh_cont_derivative(T x, int depth) {
  if (depth < 1) throw ConfigError("continued fraction depth must be >= 1");
  const T x2 = x * x;
  T r = T(2 * depth - 1);
  T dr = T(0);
  for (int i = depth - 1; i >= 1; --i) {
    if (r == T(0)) throw EvaluationSingularity(static_cast<double>(x));
    // d/dx [x^2 / r] = (2x r - x^2 r') / r^2
    const T next_dr = (T(2) * x * r - x2 * dr) / (r * r);
    r = T(2 * i - 1) + x2 / r;
    dr = next_dr;
  }
  if (r == T(0)) throw EvaluationSingularity(static_cast<double>(x));
  return (r - x * dr) / (r * r);
}

// ---------------------------------------------------------------------------
// Polynomials and rationals. Coefficient i multiplies x^i.

template <std::floating_point C, std::floating_point T>
constexpr T poly_eval(std::span<const C> coeffs, T x) noexcept {
  T acc = T(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + T(*it);
  return acc;
}

template <std::floating_point C, std::floating_point T>
constexpr T poly_derivative(std::span<const C> coeffs, T x) noexcept {
  T acc = T(0);
  for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * x + T(i) * T(coeffs[i]);
  return acc;
}

template <std::floating_point C, std::floating_point T>
T pade_eval(std::span<const C> num, std::span<const C> den, T x) {
  const T q = poly_eval(den, x);
  if (q == T(0)) throw EvaluationSingularity(static_cast<double>(x));
  return poly_eval(num, x) / q;
}

template <std::floating_point C, std::floating_point T>
T pade_derivative(std::span<const C> num, std::span<const C> den, T x) {
  const T q = poly_eval(den, x);
  if (q == T(0)) throw EvaluationSingularity(static_cast<double>(x));
  const T p = poly_eval(num, x);
  return (poly_derivative(num, x) * q - p * poly_derivative(den, x)) / (q * q);
}

// ---------------------------------------------------------------------------
// Serpentine: 2x / (x^2 + 4), peak +-0.5 at x = +-2.

template <std::floating_point T>
constexpr T serp(T x) noexcept {
  return T(2) * x / (x * x + T(4));
}

template <std::floating_point T>
constexpr T serp_derivative(T x) noexcept {
  const T d = x * x + T(4);
  return (T(8) - T(2) * x * x) / (d * d);
}

/// Serpentine on [-2, 2], +-1 outside. Jumps from 0.5 to 1 at |x| = 2.
template <std::floating_point T>
constexpr T serp_clamp(T x) noexcept {
  if (x > T(2)) return T(1);
  if (x < T(-2)) return T(-1);
  return serp(x);
}

/// Breakpoints at +-2 take the right-hand derivative.
template <std::floating_point T>
constexpr T serp_clamp_derivative(T x) noexcept {
  if (x >= T(2) || x < T(-2)) return T(0);
  return serp_derivative(x);
}

// ---------------------------------------------------------------------------
// Fast exponential exp(x) ~ (1 + x/n)^n computed with lg(n) squarings.

/// Power-of-two order n >= 2 of the fast-exp product.
class FastExpOrder {
 public:
  explicit constexpr FastExpOrder(long n) : n_(n) {
    if (n < 2 || !std::has_single_bit(static_cast<unsigned long>(n)))
      throw ConfigError("fast-exp order must be a power of two >= 2, got " + std::to_string(n));
    squarings_ = std::countr_zero(static_cast<unsigned long>(n));
  }
  constexpr long n() const noexcept { return n_; }
  constexpr int squarings() const noexcept { return squarings_; }

 private:
  long n_;
  int squarings_ = 0;
};

template <std::floating_point T>
constexpr T exp_fast(T x, FastExpOrder order) noexcept {
  // 1/n is exact for a power of two, so this equals x / n.
  T y = T(1) + x * (T(1) / T(order.n()));
  for (int k = 0; k < order.squarings(); ++k) y *= y;
  return y;
}

template <std::floating_point T>
T exp_fast(T x, long n) {
  return exp_fast(x, FastExpOrder(n));
}

/// d/dx (1 + x/n)^n = (1 + x/n)^(n-1), accumulated along the squaring chain.
template <std::floating_point T>
constexpr T exp_fast_derivative(T x, FastExpOrder order) noexcept {
  T y = T(1) + x * (T(1) / T(order.n()));
  T acc = T(1);
  for (int k = 0; k < order.squarings(); ++k) {
    acc *= y;
    y *= y;
  }
  return acc;
}

template <std::floating_point T>
constexpr T sigm_fastexp(T x, FastExpOrder order) noexcept {
  return T(1) / (T(1) + exp_fast(-x, order));
}

template <std::floating_point T>
T sigm_fastexp(T x, long n) {
  return sigm_fastexp(x, FastExpOrder(n));
}

template <std::floating_point T>
constexpr T sigm_fastexp_derivative(T x, FastExpOrder order) noexcept {
  const T s = sigm_fastexp(x, order);
  return exp_fast_derivative(-x, order) * s * s;
}

// Same arithmetic as above with n = 2^K known at compile time.

template <int K, std::floating_point T>
constexpr T exp_fast_pow2(T x) noexcept {
  static_assert(K >= 1 && K < 63);
  T y = T(1) + x * (T(1) / T(1L << K));
  for (int k = 0; k < K; ++k) y *= y;
  return y;
}

template <int K, std::floating_point T>
constexpr T exp_fast_pow2_derivative(T x) noexcept {
  T y = T(1) + x * (T(1) / T(1L << K));
  T acc = T(1);
  for (int k = 0; k < K; ++k) {
    acc *= y;
    y *= y;
  }
  return acc;
}

template <int K, std::floating_point T>
constexpr T sigm_fastexp_pow2(T x) noexcept {
  return T(1) / (T(1) + exp_fast_pow2<K>(-x));
}

template <int K, std::floating_point T>
constexpr T sigm_fastexp_pow2_derivative(T x) noexcept {
  const T s = sigm_fastexp_pow2<K>(x);
  return exp_fast_pow2_derivative<K>(-x) * s * s;
}

}  // namespace fastact
