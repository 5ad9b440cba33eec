#include "fastact/bench/error_profile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace fastact::bench {

ErrorProfile error_profile(const ActivationSpec& approx, const ActivationSpec& exact, double lo,
                           double hi, std::size_t grid_size) {
  if (!(lo < hi)) throw ConfigError("empty range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  if (grid_size < 2) throw ConfigError("grid needs at least 2 points");
  ErrorProfile p;
  p.function_name = approx.name();
  p.baseline_name = exact.name();
  p.grid.resize(grid_size);
  p.abs_error.resize(grid_size);
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = i + 1 == grid_size ? hi : lo + step * static_cast<double>(i);
    const double a = approx.value(x), e = exact.value(x);
    if (!std::isfinite(a) || !std::isfinite(e)) throw EvaluationSingularity(x);
    const double err = std::abs(a - e);
    p.grid[i] = x;
    p.abs_error[i] = err;
    sum += err;
    if (err > p.max_abs_error || i == 0) {
      p.max_abs_error = err;
      p.argmax = x;
    }
  }
  p.mean_abs_error = sum / static_cast<double>(grid_size);
  return p;
}

std::string to_csv(const ErrorProfile& profile) {
  std::string out = "x,abs_error\n";
  char buf[64];
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", profile.grid[i], profile.abs_error[i]);
    out += buf;
  }
  return out;
}

void write_csv(const ErrorProfile& profile, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << to_csv(profile);
}

}  // namespace fastact::bench
