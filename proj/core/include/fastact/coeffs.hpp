#pragma once

// Coefficient sets and the line-oriented coefficients file.
//
// File layout (one record per file):
//
//   fastact-coeffs 1 <function-name>
//   range: <lo> <hi>                       (optional)
//   poly: a0 a1 ... an                     (polynomial)
//   num: a0 ... an                         (rational)
//   den: 1 b1 ... bm                       (rational)
//   pole_free: true|false                  (rational, optional)
//   max_exp: <v>                           (lookup table)
//   table: v0 v1 ...                       (lookup table)
//   fit_report: max_abs_error=<v> mean_abs_error=<v> residual_norm=<v> condition_estimate=<v>
//   fit_report: none
//
// Doubles are written in shortest round-trip form so import(export(c)) is
// bit-exact.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fastact {

inline constexpr int kCoeffFormatVersion = 1;

struct PolyCoeffs {
  std::vector<double> a;  ///< a[i] multiplies x^i

  int order() const noexcept { return static_cast<int>(a.size()) - 1; }
  friend bool operator==(const PolyCoeffs&, const PolyCoeffs&) = default;
};

struct RationalCoeffs {
  std::vector<double> num;
  std::vector<double> den;  ///< den[0] == 1
  bool pole_free = false;   ///< certified over the fit range

  friend bool operator==(const RationalCoeffs&, const RationalCoeffs&) = default;
};

struct TableCoeffs {
  double max_exp = 0.0;
  std::vector<double> values;

  friend bool operator==(const TableCoeffs&, const TableCoeffs&) = default;
};

struct FitReport {
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  double residual_norm = 0.0;       ///< 2-norm of the least-squares system residual
  double condition_estimate = 0.0;  ///< 2-norm condition number of the design matrix

  friend bool operator==(const FitReport&, const FitReport&) = default;
};

/// Throws ConfigError on empty or non-finite coefficients.
void validate(const PolyCoeffs& c);
/// Also requires den[0] == 1 exactly.
void validate(const RationalCoeffs& c);

using CoeffData = std::variant<PolyCoeffs, RationalCoeffs, TableCoeffs>;

struct CoeffFile {
  std::string name;
  CoeffData data;
  std::optional<std::pair<double, double>> range;
  std::optional<FitReport> report;

  friend bool operator==(const CoeffFile&, const CoeffFile&) = default;
};

struct ImportResult {
  CoeffFile file;
  std::vector<std::string> warnings;
};

std::string format_coeffs(const CoeffFile& file);
/// Throws ParseError naming the offending or missing field.
ImportResult parse_coeffs(std::string_view text);

void export_coeffs(const CoeffFile& file, const std::filesystem::path& path);
ImportResult import_coeffs(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace fastact
