#include <gtest/gtest.h>

#include <cfloat>

#include <cmath>
#include <limits>
#include <vector>

#include "fastact/catalog.hpp"
#include "fastact/fitting.hpp"
#include "fastact/random.hpp"
#include "fastact/scalar.hpp"
#include "support.hpp"

using namespace fastact;

namespace {

// Reference values computed with 40-digit arithmetic.
constexpr double kTanh1 = 0.76159415595576488812;
constexpr double kTanhHalf = 0.46211715726000975850;
constexpr double kExpFast1_512 = 2.7156320001689911665;  // (1 + 1/512)^512
constexpr double kSigm1 = 0.73105857863000487925;
constexpr double kSigm55 = 0.99592986228410387267;
constexpr double kSigmFastexp55_512 = 0.99604871093455784645;

const ActivationSpec& cat(const char* name) { return Catalog::instance().get(name); }

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace

TEST(ReluSum, Examples) {
  EXPECT_EQ(relu_sum(1.5), 1.5);
  EXPECT_EQ(relu_sum(-2.0), 0.0);
  EXPECT_EQ(relu_sum(0.0), 0.0);
}

TEST(ReluSum, MatchesReluBitForBit) {
  Rng rng(11);
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform(-300, 0));
    const double a = relu_sum(x), b = relu_exact(x);
    if (a == 0.0 && b == 0.0) continue;  // signed zero may differ
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b)) << x;
  }
  // x + |x| overflows above max/2, outside the sum form's useful range.
  for (double x : {std::numeric_limits<double>::max() / 2, -std::numeric_limits<double>::max(),
                   std::numeric_limits<double>::denorm_min()})
    EXPECT_EQ(relu_sum(x), relu_exact(x));
}

TEST(Exact, Examples) {
  EXPECT_EQ(sigm_exact(0.0), 0.5);
  EXPECT_EQ(tanh_exact(0.0), 0.0);
  EXPECT_NEAR(tanh_exact(1.0), kTanh1, 1e-15);
  EXPECT_NEAR(sigm_exact(1.0), kSigm1, 1e-15);
  EXPECT_EQ(relu_exact(-3.0), 0.0);
}

TEST(TanhCont, Examples) {
  EXPECT_EQ(tanh_cont(0.0, 4), 0.0);
  for (double x : {-7.0, -0.3, 0.0, 2.5, 100.0}) EXPECT_EQ(tanh_cont(x, 1), x);
  EXPECT_NEAR(tanh_cont(1.0, 4), 115.0 / 151.0, 1e-15);
  EXPECT_THROW(tanh_cont(1.0, 0), ConfigError);
}

TEST(TanhCont, OddSymmetry) {
  for (int n = 1; n <= 8; ++n)
    for (double x : grid(-10, 10, 2001)) EXPECT_EQ(tanh_cont(-x, n), -tanh_cont(x, n)) << n << " " << x;
}

TEST(TanhCont, BoundedForEvenDepth) {
  for (int n = 2; n <= 8; n += 2)
    for (double x : grid(-5.5, 5.5, 1101)) EXPECT_LT(std::abs(tanh_cont(x, n)), 1.0) << n << " " << x;
}

TEST(TanhCont, OddDepthOvershootsOne) {
  // Odd truncations grow without bound; depth 3 passes 1 inside the fit range.
  EXPECT_LT(tanh_cont(2.0, 3), 1.0);
  EXPECT_GT(tanh_cont(5.0, 3), 1.0);
  EXPECT_GT(tanh_cont(5.5, 5), 1.0);
}

TEST(TanhCont, MonotoneUpToPeak) {
  // Odd depths are increasing everywhere; even depths up to their maximum.
  const std::vector<std::pair<int, double>> ranges = {{2, 1.7}, {3, 10}, {4, 3.0}, {5, 10},
                                                      {6, 4.3}, {7, 10}, {8, 5.6}};
  for (auto [n, r] : ranges) {
    const auto g = grid(-r, r, 2001);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(tanh_cont(g[i], n), tanh_cont(g[i - 1], n));
  }
}

TEST(TanhCont, ErrorShrinksWithDepth) {
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 8; ++n) {
    double m = 0;
    for (double x : grid(-5.5, 5.5, 10001)) m = std::max(m, std::abs(tanh_cont(x, n) - std::tanh(x)));
    EXPECT_LT(m, prev) << n;
    prev = m;
  }
}

TEST(PolyEval, Examples) {
  const std::vector<double> id = {0, 1}, q = {1, 0, 2};
  EXPECT_EQ(poly_eval(std::span<const double>(id), 3.0), 3.0);
  EXPECT_EQ(poly_eval(std::span<const double>(q), 2.0), 9.0);
}

TEST(PolyEval, ShippedTanhTaylorNearTanh) {
  const double bound = Catalog::instance().shipped_coeffs("tanh_taylor_9").report->max_abs_error;
  EXPECT_LT(bound, 0.5);
  EXPECT_LE(std::abs(cat("tanh_taylor_9").value(0.5) - kTanhHalf), bound);
}

TEST(PadeEval, Examples) {
  const std::vector<double> n1 = {0, 1}, d1 = {1}, n2 = {1}, d2 = {1, 0, 1};
  EXPECT_EQ(pade_eval(std::span<const double>(n1), std::span<const double>(d1), 7.0), 7.0);
  EXPECT_EQ(pade_eval(std::span<const double>(n2), std::span<const double>(d2), 1.0), 0.5);
  const std::vector<double> zero = {1, -1};
  EXPECT_THROW(pade_eval(std::span<const double>(n2), std::span<const double>(zero), 1.0),
               EvaluationSingularity);
}

TEST(PadeEval, ShippedTanhPadeWithinReportedError) {
  const auto& file = Catalog::instance().shipped_coeffs("tanh_pade_4_4");
  ASSERT_TRUE(file.report);
  EXPECT_LE(std::abs(cat("tanh_pade_4_4").value(1.0) - kTanh1), file.report->max_abs_error);
}

TEST(PadeEval, ShippedDenominatorsPositive) {
  for (const char* name : {"tanh_pade_4_4", "sigm_pade_4_4"}) {
    const auto& c = std::get<RationalCoeffs>(Catalog::instance().shipped_coeffs(name).data);
    for (double x : grid(-5.5, 5.5, 10001))
      EXPECT_GT(poly_eval(std::span<const double>(c.den), x), 0.0) << name << " " << x;
  }
}

TEST(Serp, Examples) {
  EXPECT_EQ(serp(0.0), 0.0);
  EXPECT_EQ(serp(2.0), 0.5);
  EXPECT_EQ(serp(-2.0), -0.5);
  EXPECT_EQ(serp_clamp(0.0), 0.0);
  EXPECT_EQ(serp_clamp(3.0), 1.0);
  EXPECT_EQ(serp_clamp(-5.0), -1.0);
}

TEST(Serp, OddSymmetry) {
  for (double x : grid(-10, 10, 2001)) {
    EXPECT_EQ(serp(-x), -serp(x));
    EXPECT_EQ(serp_clamp(-x), -serp_clamp(x));
  }
}

TEST(Serp, MonotoneOnCentralRange) {
  const auto g = grid(-2, 2, 1001);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(serp(g[i]), serp(g[i - 1]));
}

TEST(FastExp, Examples) {
  EXPECT_EQ(exp_fast(0.0, 512), 1.0);
  EXPECT_EQ(exp_fast(1.0, 2), 2.25);
  EXPECT_NEAR(exp_fast(1.0, 512), kExpFast1_512, 1e-12);
  EXPECT_EQ(sigm_fastexp(0.0, 2), 0.5);
  EXPECT_EQ(sigm_fastexp(2.0, 2), 1.0);
}

TEST(FastExp, RejectsNonPowerOfTwo) {
  for (long n : {-4L, 0L, 1L, 3L, 500L}) EXPECT_THROW(FastExpOrder{n}, ConfigError) << n;
  EXPECT_EQ(FastExpOrder(512).squarings(), 9);
}

TEST(FastExp, Sigm512AtFitEdge) {
  const double v = sigm_fastexp(5.5, 512);
  EXPECT_NEAR(v, kSigmFastexp55_512, 1e-13);
  EXPECT_LT(std::abs(v - kSigm55), 2e-4);
}

TEST(FastExp, FixedOrderKernelMatchesGeneric) {
  for (double x : grid(-8, 8, 1601)) {
    EXPECT_EQ(sigm_fastexp_pow2<9>(x), sigm_fastexp(x, 512));
    EXPECT_EQ(sigm_fastexp_pow2<1>(static_cast<float>(x)), sigm_fastexp(static_cast<float>(x), 2));
    EXPECT_EQ(sigm_fastexp_pow2_derivative<9>(x), sigm_fastexp_derivative(x, FastExpOrder(512)));
  }
}

TEST(FastExp, PointSymmetryDeviationIsSmallForLargeN) {
  // s(x) + s(-x) = 1 only when exp_fast(x) exp_fast(-x) = 1, which the
  // truncated product does not satisfy: the deviation is bounded, not zero.
  for (double x : grid(-5.5, 5.5, 1101)) EXPECT_LT(std::abs(sigm_fastexp(x, 512) + sigm_fastexp(-x, 512) - 1), 1e-3);
  EXPECT_GT(sigm_fastexp(1.0, 2) + sigm_fastexp(-1.0, 2) - 1, 0.1);
}

TEST(FastExp, MonotoneInsideOrder) {
  for (long n : {2L, 8L, 512L}) {
    const double r = std::min<double>(n, 20) * 0.999;
    const auto g = grid(-r, r, 4001);
    for (std::size_t i = 1; i < g.size(); ++i)
      EXPECT_GE(sigm_fastexp(g[i], n), sigm_fastexp(g[i - 1], n)) << n << " " << g[i];
  }
}

TEST(FastExp, Bounds) {
  for (double x : grid(-5.5, 5.5, 1101)) {
    const double v = sigm_fastexp(x, 512);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Derivative, Examples) {
  EXPECT_EQ(cat("serp").derivative(0.0), 0.5);
  EXPECT_EQ(cat("serp_clamp").derivative(3.0), 0.0);
  const auto& s = cat("sigm_fastexp_512");
  const double h = 1e-4;
  const double fd = (s.value(0.7 + h) - s.value(0.7 - h)) / (2 * h);
  EXPECT_NEAR(s.derivative(0.7), fd, 1e-5 * std::abs(fd));
}

TEST(Derivative, RightHandAtBreakpoints) {
  EXPECT_EQ(cat("relu").derivative(0.0), 1.0);
  EXPECT_EQ(cat("serp_clamp").derivative(2.0), 0.0);
  EXPECT_EQ(cat("serp_clamp").derivative(-2.0), serp_derivative(-2.0));
}

TEST(Derivative, EveryCatalogEntryMatchesFiniteDifferences) {
  const auto& c = Catalog::instance();
  auto names = c.table_names();
  for (auto& n : c.comparator_names()) names.push_back(n);
  for (auto& n : c.auxiliary_names()) names.push_back(n);
  int checked = 0;
  for (const auto& n : names) {
    const auto& spec = c.get(n);
    if (!spec.gradient_checkable()) continue;
    ++checked;
    for (const auto& m : support::gradient_mismatches(spec))
      ADD_FAILURE() << n << " at " << m.x << ": analytic " << m.analytic << " numeric " << m.numeric;
  }
  EXPECT_EQ(checked, static_cast<int>(names.size()) - 1);  // all but the NaN injector
}

TEST(Catalog, TableNames) {
  const std::vector<std::string> expected = {"relu",          "sigm",          "sigm_fastexp_2",
                                             "sigm_fastexp_512", "sigm_taylor_9", "sigm_pade_4_4",
                                             "tanh",          "tanh_cont_4",   "tanh_taylor_9",
                                             "tanh_pade_4_4", "serp",          "serp_clamp"};
  auto names = Catalog::instance().table_names();
  std::sort(names.begin(), names.end());
  auto sorted = expected;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(names, sorted);
  for (const auto& n : expected) EXPECT_EQ(Catalog::instance().get(n).name(), n);
}

TEST(Catalog, ParametricNames) {
  const auto& c = Catalog::instance();
  ASSERT_TRUE(c.find("tanh_cont_6"));
  EXPECT_EQ(c.find("tanh_cont_6")->value(1.0), tanh_cont(1.0, 6));
  ASSERT_TRUE(c.find("sigm_fastexp_64"));
  EXPECT_EQ(c.find("sigm_fastexp_64")->value(0.3), sigm_fastexp(0.3, 64));
  EXPECT_FALSE(c.find("sigm_fastexp_100"));
  EXPECT_FALSE(c.find("nosuch"));
  EXPECT_THROW(c.get("nosuch"), ConfigError);
}

TEST(Catalog, SafetyClasses) {
  EXPECT_FALSE(cat("sigm_fastexp_512").safety().ranged);
  EXPECT_FALSE(cat("tanh_pade_4_4").safety().ranged);
  EXPECT_TRUE(cat("sigm_fastexp_2").safety().ranged);
  EXPECT_TRUE(cat("serp").safety().ranged);
  EXPECT_TRUE(cat("tanh_pade_4_4_raw").safety().ranged);
}

TEST(Catalog, F32PathTracksF64) {
  const auto& c = Catalog::instance();
  for (const auto& n : c.table_names()) {
    const auto& spec = c.get(n);
    // Raising 1 + x/n to the n-th power scales the f32 rounding error by n.
    double tol = 1e-5;
    if (spec.kind() == Kind::fastexp) tol = std::max(tol, 4.0 * std::stod(n.substr(n.rfind('_') + 1)) * FLT_EPSILON);
    for (double x : grid(-5, 5, 101)) {
      const double a = spec.value(static_cast<float>(x));
      const double b = spec.value(static_cast<double>(static_cast<float>(x)));
      EXPECT_NEAR(a, b, tol * std::max(1.0, std::abs(b))) << n << " " << x;
    }
  }
}

TEST(Catalog, ApplyMatchesScalar) {
  const auto& spec = cat("tanh_pade_4_4");
  std::vector<float> in, out(201), dout(201);
  for (double x : grid(-10, 10, 201)) in.push_back(static_cast<float>(x));
  spec.apply(in, out);
  spec.apply_derivative(in, dout);
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i], spec.value(in[i]));
    EXPECT_EQ(dout[i], spec.derivative(in[i]));
  }
}

TEST(Catalog, ClampedPadeIsBoundedEverywhere) {
  const auto& spec = cat("tanh_pade_4_4");
  for (int s : {-1, 1})
    for (double e = -3; e <= std::log10(88.0); e += 0.01) {
      const double x = s * std::pow(10.0, e);
      const float v = spec.value(static_cast<float>(x));
      EXPECT_LE(std::abs(v), 1.0f);
      EXPECT_LT(std::abs(v - std::tanh(x)), 0.01) << x;
    }
}

TEST(Catalog, Sigm512BoundedEverywhere) {
  const auto& spec = cat("sigm_fastexp_512");
  for (int s : {-1, 1})
    for (double e = -3; e <= std::log10(88.0); e += 0.01) {
      const double x = s * std::pow(10.0, e);
      EXPECT_LT(std::abs(spec.value(static_cast<float>(x)) - sigm_exact(x)), 0.01) << x;
    }
}
