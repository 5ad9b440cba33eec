#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fastact/activation.hpp"

namespace fastact::bench {

/// Pointwise |approx - exact| on a uniform f64 grid.
struct ErrorProfile {
  std::string function_name;
  std::string baseline_name;
  std::vector<double> grid;
  std::vector<double> abs_error;
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  double argmax = 0.0;  ///< x of the maximum error
};

/// Grid of grid_size points spanning [lo, hi] inclusive. Throws ConfigError
/// for an empty range or grid_size < 2, EvaluationSingularity (carrying x)
/// when either function is non-finite or singular at a grid point.
ErrorProfile error_profile(const ActivationSpec& approx, const ActivationSpec& exact, double lo,
                           double hi, std::size_t grid_size);

/// Header `x,abs_error`, 17 significant digits.
std::string to_csv(const ErrorProfile& profile);
void write_csv(const ErrorProfile& profile, const std::filesystem::path& path);

}  // namespace fastact::bench
