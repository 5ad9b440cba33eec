#pragma once

// Least-squares fitting of polynomial (Taylor-form) and rational (Padé-form)
// approximants on a uniform sample, plus pole certification for rationals.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fastact/coeffs.hpp"

namespace fastact {

enum class FitTarget { tanh, sigmoid, custom };

struct FitConfig {
  double range_lo = -5.5;
  double range_hi = 5.5;
  int sample_count = 5000;
  FitTarget target = FitTarget::tanh;
  /// For FitTarget::custom: a function, or one of the built-in names
  /// ("identity", "tanh", "sigmoid") when the function is empty.
  std::string custom_name;
  std::function<double(double)> custom_fn;
};

struct Sample {
  double x;
  double y;
};

/// sample_count equally spaced points covering [range_lo, range_hi] inclusive.
/// Throws ConfigError for an invalid range/count or an unknown custom target.
std::vector<Sample> sample_uniform(const FitConfig& config);

struct PolyFit {
  PolyCoeffs coeffs;
  FitReport report;
};

struct RationalFit {
  RationalCoeffs coeffs;
  FitReport report;
};

struct PadeOptions {
  /// One extra solve with every row divided by |Q(x)| of the first solution.
  bool reweight = false;
  /// Range certified after the fit; defaults to the sample span.
  std::optional<std::pair<double, double>> certify_range;
};

/// Ordinary least squares on the Vandermonde system (Householder QR, f64).
/// Throws FitFailure when the system is rank deficient.
PolyFit fit_taylor(std::span<const Sample> samples, int order);

/// Linearized rational least squares: minimizes sum (f Q - P)^2 with b0 = 1.
/// The report's error fields use the true residual |f - P/Q|.
/// Throws FitFailure (rank deficiency) or PoleInRange.
RationalFit fit_pade(std::span<const Sample> samples, int num_order, int den_order,
                     const PadeOptions& options = {});

/// Grid resolution used for pole certification.
inline constexpr int kCertificationGrid = 10001;

/// Location of a sign change (or zero) of the denominator on the
/// certification grid over [lo, hi], refined by bisection. Empty if none.
std::optional<double> find_pole(std::span<const double> den, double lo, double hi);

/// True iff the denominator keeps a constant nonzero sign on the grid.
bool certify_pole_free(const RationalCoeffs& coeffs, double lo, double hi);

/// Report for an arbitrary approximation against the sample values.
FitReport evaluate_fit(std::span<const Sample> samples, const std::function<double(double)>& approx);

/// Default configuration for a canonical catalog fit, e.g. target tanh.
FitConfig canonical_config(FitTarget target);

/// Refits one of the shipped canonical coefficient sets ("tanh_taylor_9",
/// "tanh_pade_4_4", "sigm_taylor_9", "sigm_pade_4_4") with the default
/// configuration; used to regenerate and to verify the shipped data files.
CoeffFile fit_canonical(const std::string& name);

}  // namespace fastact
