#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fastact/coeffs.hpp"
#include "fastact/comparators.hpp"
#include "fastact/scalar.hpp"

namespace fastact {

enum class Kind {
  exact,
  continued_fraction,
  taylor,
  pade,
  fastexp,
  serpentine,
  serpentine_clamped,
  relu_sum,
  comparator,
  custom,  ///< arbitrary callables, used for fault injection
};

enum class ExactFunction { identity, relu, sigm, tanh };

/// Which exact function an entry stands in for.
enum class Family { sigmoid, tanh, relu, identity, any };

/// Precision of an evaluation path: training and micro-benchmarks run in f32,
/// fitting and error analysis in f64.
enum class EvalPrecision { f32, f64 };

struct Safety {
  bool ranged = false;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static Safety safe() { return {}; }
  static Safety ranged_on(double lo, double hi) { return {true, lo, hi}; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Output/input clamp for the safe rational variant.
struct RationalClamp {
  double input_lo, input_hi;
  double output_lo, output_hi;
};

enum class ComparatorId { ultra_fast_sigmoid, word2vec };

namespace params {
struct ContinuedFraction {
  int depth;
};
struct Poly {
  PolyCoeffs coeffs;
  std::vector<float> a32;
};
struct Rational {
  RationalCoeffs coeffs;
  std::vector<float> num32, den32;
  std::optional<RationalClamp> clamp;
};
struct FastExp {
  FastExpOrder order;
};
struct Comparator {
  ComparatorId id;
  std::shared_ptr<const LookupTable> table;
};
struct Custom {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};
}  // namespace params

namespace kernels {

template <std::floating_point T, std::size_t N>
constexpr T horner(const std::array<T, N>& a, T x) noexcept {
  T acc = a[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + a[i];
  return acc;
}

template <std::floating_point T, std::size_t N>
constexpr T horner_derivative(const std::array<T, N>& a, T x) noexcept {
  if constexpr (N == 1) {
    return T(0);
  } else {
    T acc = T(N - 1) * a[N - 1];
    for (std::size_t i = N - 1; i-- > 1;) acc = acc * x + T(i) * a[i];
    return acc;
  }
}

struct Exact {
  ExactFunction fn;
  template <class T>
  T value(T x) const noexcept {
    switch (fn) {
      case ExactFunction::identity: return x;
      case ExactFunction::relu: return relu_exact(x);
      case ExactFunction::sigm: return sigm_exact(x);
      case ExactFunction::tanh: return tanh_exact(x);
    }
    return x;
  }
  template <class T>
  T derivative(T x) const noexcept {
    switch (fn) {
      case ExactFunction::identity: return T(1);
      case ExactFunction::relu: return relu_exact_derivative(x);
      case ExactFunction::sigm: return sigm_exact_derivative(x);
      case ExactFunction::tanh: return tanh_exact_derivative(x);
    }
    return T(1);
  }
};

// Specialized per exact function so the hot loops inline one code path.
template <ExactFunction F>
struct ExactFixed {
  template <class T>
  T value(T x) const noexcept { return Exact{F}.value(x); }
  template <class T>
  T derivative(T x) const noexcept { return Exact{F}.derivative(x); }
};

struct ContinuedFraction {
  int depth;
  template <class T>
  T value(T x) const { return tanh_cont(x, depth); }
  template <class T>
  T derivative(T x) const { return tanh_cont_derivative(x, depth); }
};

struct Poly {
  std::span<const double> a64;
  std::span<const float> a32;
  template <class T>
  std::span<const T> coeffs() const noexcept {
    if constexpr (std::is_same_v<T, float>) return a32; else return a64;
  }
  template <class T>
  T value(T x) const noexcept { return poly_eval(coeffs<T>(), x); }
  template <class T>
  T derivative(T x) const noexcept { return poly_derivative(coeffs<T>(), x); }
};

/// Fixed-length polynomial; lets the compiler unroll and vectorize.
template <std::size_t N>
struct PolyFixed {
  std::array<float, N> a32;
  std::array<double, N> a64;
  template <class T>
  const std::array<T, N>& coeffs() const noexcept {
    if constexpr (std::is_same_v<T, float>) return a32; else return a64;
  }
  template <class T>
  T value(T x) const noexcept { return horner(coeffs<T>(), x); }
  template <class T>
  T derivative(T x) const noexcept { return horner_derivative(coeffs<T>(), x); }
};

template <class T>
constexpr T clamp_to(T v, double lo, double hi) noexcept {
  return v < T(lo) ? T(lo) : (v > T(hi) ? T(hi) : v);
}

struct Rational {
  std::span<const double> num64, den64;
  std::span<const float> num32, den32;
  std::optional<RationalClamp> clamp;

  template <class T>
  T value(T x) const {
    auto [num, den] = pick<T>();
    if (!clamp) return pade_eval(num, den, x);
    const T y = pade_eval(num, den, clamp_to(x, clamp->input_lo, clamp->input_hi));
    return clamp_to(y, clamp->output_lo, clamp->output_hi);
  }
  template <class T>
  T derivative(T x) const {
    auto [num, den] = pick<T>();
    if (!clamp) return pade_derivative(num, den, x);
    if (x >= T(clamp->input_hi) || x < T(clamp->input_lo)) return T(0);
    const T y = pade_eval(num, den, x);
    if (y >= T(clamp->output_hi) || y <= T(clamp->output_lo)) return T(0);
    return pade_derivative(num, den, x);
  }

 private:
  template <class T>
  std::pair<std::span<const T>, std::span<const T>> pick() const noexcept {
    if constexpr (std::is_same_v<T, float>) return {num32, den32}; else return {num64, den64};
  }
};

template <std::size_t N, std::size_t M>
struct RationalFixed {
  std::array<float, N> num32;
  std::array<float, M> den32;
  std::array<double, N> num64;
  std::array<double, M> den64;
  std::optional<RationalClamp> clamp;

  template <class T>
  T raw(T x) const noexcept {
    if constexpr (std::is_same_v<T, float>)
      return horner(num32, x) / horner(den32, x);
    else
      return horner(num64, x) / horner(den64, x);
  }
  template <class T>
  T raw_derivative(T x) const noexcept {
    const auto& num = std::get<std::is_same_v<T, float> ? 0 : 1>(std::tie(num32, num64));
    const auto& den = std::get<std::is_same_v<T, float> ? 0 : 1>(std::tie(den32, den64));
    const T q = horner(den, x);
    return (horner_derivative(num, x) * q - horner(num, x) * horner_derivative(den, x)) / (q * q);
  }
  // Certified pole-free shipped sets only; no zero-denominator check here.
  template <class T>
  T value(T x) const noexcept {
    if (!clamp) return raw(x);
    const T y = raw(clamp_to(x, clamp->input_lo, clamp->input_hi));
    return clamp_to(y, clamp->output_lo, clamp->output_hi);
  }
  template <class T>
  T derivative(T x) const noexcept {
    if (!clamp) return raw_derivative(x);
    if (x >= T(clamp->input_hi) || x < T(clamp->input_lo)) return T(0);
    const T y = raw(x);
    if (y >= T(clamp->output_hi) || y <= T(clamp->output_lo)) return T(0);
    return raw_derivative(x);
  }
};

/// Order fixed at compile time so evaluation loops unroll and vectorize.
template <int Squarings>
struct FastExpFixed {
  template <class T>
  T value(T x) const noexcept { return sigm_fastexp_pow2<Squarings>(x); }
  template <class T>
  T derivative(T x) const noexcept { return sigm_fastexp_pow2_derivative<Squarings>(x); }
};

struct FastExp {
  FastExpOrder order;
  template <class T>
  T value(T x) const noexcept { return sigm_fastexp(x, order); }
  template <class T>
  T derivative(T x) const noexcept { return sigm_fastexp_derivative(x, order); }
};

struct Serpentine {
  template <class T>
  T value(T x) const noexcept { return serp(x); }
  template <class T>
  T derivative(T x) const noexcept { return serp_derivative(x); }
};

struct SerpentineClamped {
  template <class T>
  T value(T x) const noexcept { return serp_clamp(x); }
  template <class T>
  T derivative(T x) const noexcept { return serp_clamp_derivative(x); }
};

struct ReluSum {
  template <class T>
  T value(T x) const noexcept { return relu_sum(x); }
  template <class T>
  T derivative(T x) const noexcept { return relu_exact_derivative(x); }
};

struct UltraFast {
  template <class T>
  T value(T x) const noexcept { return ultra_fast_sigmoid(x); }
  template <class T>
  T derivative(T x) const noexcept { return ultra_fast_sigmoid_derivative(x); }
};

struct Word2Vec {
  const LookupTable* table;
  template <class T>
  T value(T x) const noexcept { return w2v_sigmoid(x, *table); }
  template <class T>
  T derivative(T x) const noexcept { return w2v_sigmoid_derivative(x, *table); }
};

struct Custom {
  const params::Custom* fns;
  template <class T>
  T value(T x) const { return static_cast<T>(fns->value(static_cast<double>(x))); }
  template <class T>
  T derivative(T x) const { return static_cast<T>(fns->derivative(static_cast<double>(x))); }
};

}  // namespace kernels

/// A named scalar activation: value, analytic derivative, safety class.
///
/// Derivatives at piecewise breakpoints are right-hand one-sided. Values are
/// immutable after construction; copies are cheap (lookup tables are shared).
class ActivationSpec {
 public:
  using Params = std::variant<std::monostate, ExactFunction, params::ContinuedFraction,
                              params::Poly, params::Rational, params::FastExp,
                              params::Comparator, params::Custom>;

  static ActivationSpec exact(ExactFunction fn);
  static ActivationSpec continued_fraction(int depth);
  static ActivationSpec taylor(std::string name, Family family, PolyCoeffs coeffs, Safety safety);
  static ActivationSpec pade(std::string name, Family family, RationalCoeffs coeffs, Safety safety,
                             std::optional<RationalClamp> clamp = std::nullopt);
  static ActivationSpec fastexp(long n);
  static ActivationSpec serpentine();
  static ActivationSpec serpentine_clamped();
  static ActivationSpec relu_branchless();
  static ActivationSpec ultra_fast();
  static ActivationSpec word2vec(std::shared_ptr<const LookupTable> table);
  static ActivationSpec custom(std::string name, Family family,
                               std::function<double(double)> value,
                               std::function<double(double)> derivative);

  const std::string& name() const noexcept { return name_; }
  Kind kind() const noexcept { return kind_; }
  Family family() const noexcept { return family_; }
  const Safety& safety() const noexcept { return safety_; }
  const Params& params() const noexcept { return params_; }

  /// Points where the function or its derivative is not smooth.
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  /// False for opaque custom callables.
  bool gradient_checkable() const noexcept;

  template <class T>
  T value(T x) const {
    return visit([x](const auto& k) { return k.value(x); });
  }
  template <class T>
  T derivative(T x) const {
    return visit([x](const auto& k) { return k.derivative(x); });
  }

  void apply(std::span<const float> in, std::span<float> out) const;
  void apply_derivative(std::span<const float> in, std::span<float> out) const;

  /// Calls f with the concrete kernel for this spec, so loops inside f are
  /// compiled per kernel type.
  template <class F>
  decltype(auto) visit(F&& f) const;

 private:
  ActivationSpec(std::string name, Kind kind, Family family, Safety safety, Params params,
                 std::vector<double> breakpoints = {});

  std::string name_;
  Kind kind_;
  Family family_;
  Safety safety_;
  Params params_;
  std::vector<double> breakpoints_;
};

template <class F>
decltype(auto) ActivationSpec::visit(F&& f) const {
  switch (kind_) {
    case Kind::exact:
      switch (std::get<ExactFunction>(params_)) {
        case ExactFunction::identity: return f(kernels::ExactFixed<ExactFunction::identity>{});
        case ExactFunction::relu: return f(kernels::ExactFixed<ExactFunction::relu>{});
        case ExactFunction::sigm: return f(kernels::ExactFixed<ExactFunction::sigm>{});
        case ExactFunction::tanh: return f(kernels::ExactFixed<ExactFunction::tanh>{});
      }
      break;
    case Kind::continued_fraction:
      return f(kernels::ContinuedFraction{std::get<params::ContinuedFraction>(params_).depth});
    case Kind::taylor: {
      const auto& p = std::get<params::Poly>(params_);
      if (p.a32.size() == 10) {
        kernels::PolyFixed<10> k;
        std::copy_n(p.a32.begin(), 10, k.a32.begin());
        std::copy_n(p.coeffs.a.begin(), 10, k.a64.begin());
        return f(k);
      }
      return f(kernels::Poly{p.coeffs.a, p.a32});
    }
    case Kind::pade: {
      const auto& p = std::get<params::Rational>(params_);
      if (p.num32.size() == 5 && p.den32.size() == 5 && p.coeffs.pole_free) {
        kernels::RationalFixed<5, 5> k;
        std::copy_n(p.num32.begin(), 5, k.num32.begin());
        std::copy_n(p.den32.begin(), 5, k.den32.begin());
        std::copy_n(p.coeffs.num.begin(), 5, k.num64.begin());
        std::copy_n(p.coeffs.den.begin(), 5, k.den64.begin());
        k.clamp = p.clamp;
        return f(k);
      }
      return f(kernels::Rational{p.coeffs.num, p.coeffs.den, p.num32, p.den32, p.clamp});
    }
    case Kind::fastexp: {
      const FastExpOrder order = std::get<params::FastExp>(params_).order;
      switch (order.squarings()) {
        case 1: return f(kernels::FastExpFixed<1>{});
        case 2: return f(kernels::FastExpFixed<2>{});
        case 3: return f(kernels::FastExpFixed<3>{});
        case 4: return f(kernels::FastExpFixed<4>{});
        case 5: return f(kernels::FastExpFixed<5>{});
        case 6: return f(kernels::FastExpFixed<6>{});
        case 7: return f(kernels::FastExpFixed<7>{});
        case 8: return f(kernels::FastExpFixed<8>{});
        case 9: return f(kernels::FastExpFixed<9>{});
        case 10: return f(kernels::FastExpFixed<10>{});
        default: return f(kernels::FastExp{order});
      }
    }
    case Kind::serpentine:
      return f(kernels::Serpentine{});
    case Kind::serpentine_clamped:
      return f(kernels::SerpentineClamped{});
    case Kind::relu_sum:
      return f(kernels::ReluSum{});
    case Kind::comparator: {
      const auto& p = std::get<params::Comparator>(params_);
      if (p.id == ComparatorId::word2vec) return f(kernels::Word2Vec{p.table.get()});
      return f(kernels::UltraFast{});
    }
    case Kind::custom:
      return f(kernels::Custom{&std::get<params::Custom>(params_)});
  }
  return f(kernels::ExactFixed<ExactFunction::identity>{});
}

std::string_view to_string(Kind kind) noexcept;
std::string_view to_string(Family family) noexcept;

}  // namespace fastact
