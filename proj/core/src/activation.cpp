#include "fastact/activation.hpp"

#include <algorithm>

#include "fastact/error.hpp"
#include "fastact/fitting.hpp"

namespace fastact {
namespace {

inline constexpr double kFitLo = -5.5;
inline constexpr double kFitHi = 5.5;

std::vector<float> to_f32(const std::vector<double>& v) { return {v.begin(), v.end()}; }

// Roots of P(x) - c Q(x) on [lo, hi], located on a uniform grid and refined
// by bisection.
std::vector<double> level_crossings(const RationalCoeffs& r, double c, double lo, double hi) {
  const std::span<const double> num(r.num), den(r.den);
  auto g = [&](double x) { return poly_eval(num, x) - c * poly_eval(den, x); };
  std::vector<double> out;
  const int n = kCertificationGrid;
  const double step = (hi - lo) / (n - 1);
  double px = lo, pg = g(lo);
  for (int i = 1; i < n; ++i) {
    const double x = i == n - 1 ? hi : lo + step * i;
    const double gx = g(x);
    if ((gx > 0.0) != (pg > 0.0)) {
      double a = px, b = x;
      const bool a_pos = pg > 0.0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        ((g(m) > 0.0) == a_pos ? a : b) = m;
      }
      out.push_back(0.5 * (a + b));
    }
    px = x;
    pg = gx;
  }
  return out;
}

}  // namespace

ActivationSpec::ActivationSpec(std::string name, Kind kind, Family family, Safety safety,
                               Params params, std::vector<double> breakpoints)
    : name_(std::move(name)),
      kind_(kind),
      family_(family),
      safety_(safety),
      params_(std::move(params)),
      breakpoints_(std::move(breakpoints)) {
  std::sort(breakpoints_.begin(), breakpoints_.end());
}

ActivationSpec ActivationSpec::exact(ExactFunction fn) {
  switch (fn) {
    case ExactFunction::identity:
      return {"identity", Kind::exact, Family::identity, Safety::safe(), fn};
    case ExactFunction::relu:
      return {"relu", Kind::exact, Family::relu, Safety::safe(), fn, {0.0}};
    case ExactFunction::sigm:
      return {"sigm", Kind::exact, Family::sigmoid, Safety::safe(), fn};
    case ExactFunction::tanh:
      return {"tanh", Kind::exact, Family::tanh, Safety::safe(), fn};
  }
  throw ConfigError("unknown exact function");
}

ActivationSpec ActivationSpec::continued_fraction(int depth) {
  if (depth < 1) throw ConfigError("continued fraction depth must be >= 1");
  return {"tanh_cont_" + std::to_string(depth), Kind::continued_fraction, Family::tanh,
          Safety::ranged_on(kFitLo, kFitHi), params::ContinuedFraction{depth}};
}

ActivationSpec ActivationSpec::taylor(std::string name, Family family, PolyCoeffs coeffs,
                                      Safety safety) {
  validate(coeffs);
  auto a32 = to_f32(coeffs.a);
  return {std::move(name), Kind::taylor, family, safety, params::Poly{std::move(coeffs), std::move(a32)}};
}

ActivationSpec ActivationSpec::pade(std::string name, Family family, RationalCoeffs coeffs,
                                    Safety safety, std::optional<RationalClamp> clamp) {
  validate(coeffs);
  std::vector<double> breaks;
  if (clamp) {
    if (!(clamp->input_lo < clamp->input_hi) || !(clamp->output_lo < clamp->output_hi))
      throw ConfigError("rational clamp bounds must satisfy lo < hi");
    if (auto pole = find_pole(coeffs.den, clamp->input_lo, clamp->input_hi)) throw PoleInRange(*pole);
    breaks = {clamp->input_lo, clamp->input_hi};
    for (double c : {clamp->output_lo, clamp->output_hi})
      for (double x : level_crossings(coeffs, c, clamp->input_lo, clamp->input_hi)) breaks.push_back(x);
  }
  auto num32 = to_f32(coeffs.num);
  auto den32 = to_f32(coeffs.den);
  return {std::move(name), Kind::pade, family, safety,
          params::Rational{std::move(coeffs), std::move(num32), std::move(den32), clamp},
          std::move(breaks)};
}

ActivationSpec ActivationSpec::fastexp(long n) {
  FastExpOrder order(n);
  const Safety safety = n >= 512 ? Safety::safe() : Safety::ranged_on(kFitLo, kFitHi);
  return {"sigm_fastexp_" + std::to_string(n), Kind::fastexp, Family::sigmoid, safety,
          params::FastExp{order}};
}

ActivationSpec ActivationSpec::serpentine() {
  return {"serp", Kind::serpentine, Family::tanh, Safety::ranged_on(kFitLo, kFitHi), std::monostate{}};
}

ActivationSpec ActivationSpec::serpentine_clamped() {
  return {"serp_clamp", Kind::serpentine_clamped, Family::tanh, Safety::safe(), std::monostate{},
          {-2.0, 2.0}};
}

ActivationSpec ActivationSpec::relu_branchless() {
  return {"relu_sum", Kind::relu_sum, Family::relu, Safety::safe(), std::monostate{}, {0.0}};
}

ActivationSpec ActivationSpec::ultra_fast() {
  namespace k = ultra_fast_constants;
  const double r = 2.0 * k::kRationalEnd, l = 2.0 * k::kLinearEnd;
  return {"ultra_fast_sigmoid", Kind::comparator, Family::sigmoid, Safety::safe(),
          params::Comparator{ComparatorId::ultra_fast_sigmoid, nullptr},
          {-l, -r, 0.0, r, l}};  // |u| makes the curvature jump at 0
}

ActivationSpec ActivationSpec::word2vec(std::shared_ptr<const LookupTable> table) {
  if (!table) throw ConfigError("word2vec activation needs a lookup table");
  auto edges = table->step_edges();
  return {"word2vec", Kind::comparator, Family::sigmoid, Safety::safe(),
          params::Comparator{ComparatorId::word2vec, std::move(table)}, std::move(edges)};
}

ActivationSpec ActivationSpec::custom(std::string name, Family family,
                                      std::function<double(double)> value,
                                      std::function<double(double)> derivative) {
  if (!value || !derivative) throw ConfigError("custom activation needs value and derivative");
  return {std::move(name), Kind::custom, family, Safety::safe(),
          params::Custom{std::move(value), std::move(derivative)}};
}

bool ActivationSpec::gradient_checkable() const noexcept { return kind_ != Kind::custom; }

void ActivationSpec::apply(std::span<const float> in, std::span<float> out) const {
  if (in.size() != out.size()) throw ConfigError("apply: size mismatch");
  visit([&](const auto& k) {
    const float* src = in.data();
    float* dst = out.data();
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) dst[i] = k.value(src[i]);
  });
}

void ActivationSpec::apply_derivative(std::span<const float> in, std::span<float> out) const {
  if (in.size() != out.size()) throw ConfigError("apply_derivative: size mismatch");
  visit([&](const auto& k) {
    const float* src = in.data();
    float* dst = out.data();
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) dst[i] = k.derivative(src[i]);
  });
}

std::string_view to_string(Kind kind) noexcept {
  switch (kind) {
    case Kind::exact: return "exact";
    case Kind::continued_fraction: return "continued_fraction";
    case Kind::taylor: return "taylor";
    case Kind::pade: return "pade";
    case Kind::fastexp: return "fastexp";
    case Kind::serpentine: return "serpentine";
    case Kind::serpentine_clamped: return "serpentine_clamped";
    case Kind::relu_sum: return "relu_sum";
    case Kind::comparator: return "comparator";
    case Kind::custom: return "custom";
  }
  return "?";
}

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::sigmoid: return "sigmoid";
    case Family::tanh: return "tanh";
    case Family::relu: return "relu";
    case Family::identity: return "identity";
    case Family::any: return "any";
  }
  return "?";
}

}  // namespace fastact
