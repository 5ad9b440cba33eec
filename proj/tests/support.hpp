#pragma once
// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "fastact/activation.hpp"

namespace fastact::support {

struct GradMismatch {
  double x;
  double analytic;
  double numeric;
};

inline constexpr double kFdStep = 1e-4;
inline constexpr double kFdRelTol = 1e-5;
inline constexpr double kBreakpointGap = 1e-3;
// Central differences at a stationary point are O(h^2) rather than exactly
// zero, so a pure relative test cannot pass there.
inline constexpr double kFdAbsFloor = 1e-9;

inline bool near_breakpoint(const ActivationSpec& spec, double x) {
  const auto& bp = spec.breakpoints();
  auto it = std::lower_bound(bp.begin(), bp.end(), x - kBreakpointGap);
  return it != bp.end() && *it <= x + kBreakpointGap;
}

/// Analytic f64 derivative against central differences at `points` evenly
/// spaced points of [lo, hi], skipping breakpoint neighbourhoods.
inline std::vector<GradMismatch> gradient_mismatches(const ActivationSpec& spec, double lo = -5.0,
                                                     double hi = 5.0, int points = 101) {
  std::vector<GradMismatch> bad;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    if (near_breakpoint(spec, x)) continue;
    const double fd = (spec.value(x + kFdStep) - spec.value(x - kFdStep)) / (2 * kFdStep);
    const double an = spec.derivative(x);
    const double scale = std::max(std::abs(fd), std::abs(an));
    if (!(std::abs(an - fd) <= kFdRelTol * scale + kFdAbsFloor)) bad.push_back({x, an, fd});
  }
  return bad;
}

inline double max_abs_error(const ActivationSpec& approx, const ActivationSpec& exact, double lo,
                            double hi, int points) {
  double m = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    m = std::max(m, std::abs(approx.value(x) - exact.value(x)));
  }
  return m;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

/// Runs a command through the shell; stdout is captured, stderr discarded.
inline CommandResult run_command(const std::vector<std::string>& argv) {
  std::string cmd;
  for (const auto& a : argv) cmd += shell_quote(a) + " ";
  cmd += "2>/dev/null";
  CommandResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fastact_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fastact::support
