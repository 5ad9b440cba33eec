#include "fastact/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "fastact/error.hpp"
#include "fastact/scalar.hpp"

namespace fastact {
namespace {

double condition_number(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

struct Solution {
  Eigen::VectorXd coeffs;
  double residual_norm;
  double condition;
};

Solution solve_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const double cond = condition_number(a);
  if (qr.rank() < a.cols())
    throw FitFailure("least-squares system is rank deficient (rank " + std::to_string(qr.rank()) +
                         " < " + std::to_string(a.cols()) + ", condition estimate " +
                         std::to_string(cond) + ")",
                     cond);
  Eigen::VectorXd x = qr.solve(b);
  return {x, (a * x - b).norm(), cond};
}

double builtin_target(const std::string& name, double x) {
  if (name == "identity") return x;
  if (name == "tanh") return tanh_exact(x);
  if (name == "sigmoid" || name == "sigm") return sigm_exact(x);
  throw ConfigError("unknown fit target '" + name + "'");
}

}  // namespace

std::vector<Sample> sample_uniform(const FitConfig& config) {
  if (!(config.range_lo < config.range_hi) || !std::isfinite(config.range_lo) ||
      !std::isfinite(config.range_hi))
    throw ConfigError("fit range must satisfy lo < hi");
  if (config.sample_count < 2) throw ConfigError("sample count must be >= 2");

  std::function<double(double)> f;
  switch (config.target) {
    case FitTarget::tanh:
      f = [](double x) { return tanh_exact(x); };
      break;
    case FitTarget::sigmoid:
      f = [](double x) { return sigm_exact(x); };
      break;
    case FitTarget::custom:
      if (config.custom_fn) {
        f = config.custom_fn;
      } else {
        builtin_target(config.custom_name, 0.0);  // validates the name
        f = [name = config.custom_name](double x) { return builtin_target(name, x); };
      }
      break;
  }

  const int n = config.sample_count;
  const double step = (config.range_hi - config.range_lo) / (n - 1);
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = i == n - 1 ? config.range_hi : config.range_lo + step * i;
    out.push_back({x, f(x)});
  }
  return out;
}

FitReport evaluate_fit(std::span<const Sample> samples,
                       const std::function<double(double)>& approx) {
  FitReport r;
  double sum = 0.0;
  for (const auto& s : samples) {
    const double e = std::abs(approx(s.x) - s.y);
    r.max_abs_error = std::max(r.max_abs_error, e);
    sum += e;
  }
  r.mean_abs_error = samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
  return r;
}

PolyFit fit_taylor(std::span<const Sample> samples, int order) {
  if (order < 0) throw ConfigError("polynomial order must be >= 0");
  const auto cols = static_cast<Eigen::Index>(order) + 1;
  const auto rows = static_cast<Eigen::Index>(samples.size());
  if (rows < cols)
    throw ConfigError("need at least " + std::to_string(cols) + " samples for order " +
                      std::to_string(order));

  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double x = samples[static_cast<std::size_t>(i)].x;
    double p = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      a(i, j) = p;
      p *= x;
    }
    b(i) = samples[static_cast<std::size_t>(i)].y;
  }

  const auto sol = solve_least_squares(a, b);
  PolyFit fit;
  fit.coeffs.a.assign(sol.coeffs.data(), sol.coeffs.data() + sol.coeffs.size());
  const std::span<const double> c(fit.coeffs.a);
  fit.report = evaluate_fit(samples, [c](double x) { return poly_eval(c, x); });
  fit.report.residual_norm = sol.residual_norm;
  fit.report.condition_estimate = sol.condition;
  return fit;
}

RationalFit fit_pade(std::span<const Sample> samples, int num_order, int den_order,
                     const PadeOptions& options) {
  if (num_order < 0 || den_order < 0) throw ConfigError("rational orders must be >= 0");
  const Eigen::Index n_num = num_order + 1;
  const Eigen::Index cols = n_num + den_order;
  const auto rows = static_cast<Eigen::Index>(samples.size());
  if (rows < cols)
    throw ConfigError("need at least " + std::to_string(cols) + " samples for orders (" +
                      std::to_string(num_order) + "," + std::to_string(den_order) + ")");

  // Row i: P(x_i) - f_i * sum_{j>=1} b_j x_i^j = f_i
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  const int max_order = std::max(num_order, den_order);
  std::vector<double> powers(static_cast<std::size_t>(max_order) + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    double p = 1.0;
    for (auto& v : powers) {
      v = p;
      p *= s.x;
    }
    for (Eigen::Index k = 0; k < n_num; ++k) a(i, k) = powers[static_cast<std::size_t>(k)];
    for (int j = 1; j <= den_order; ++j) a(i, n_num + j - 1) = -s.y * powers[static_cast<std::size_t>(j)];
    b(i) = s.y;
  }

  auto unpack = [&](const Eigen::VectorXd& v) {
    RationalCoeffs r;
    r.num.assign(v.data(), v.data() + n_num);
    r.den.reserve(static_cast<std::size_t>(den_order) + 1);
    r.den.push_back(1.0);
    for (int j = 0; j < den_order; ++j) r.den.push_back(v(n_num + j));
    return r;
  };

  auto sol = solve_least_squares(a, b);
  RationalCoeffs coeffs = unpack(sol.coeffs);

  if (options.reweight) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double q = std::abs(poly_eval(std::span<const double>(coeffs.den),
                                          samples[static_cast<std::size_t>(i)].x));
      if (q == 0.0) throw PoleInRange(samples[static_cast<std::size_t>(i)].x);
      a.row(i) /= q;
      b(i) /= q;
    }
    sol = solve_least_squares(a, b);
    coeffs = unpack(sol.coeffs);
  }

  double lo = samples.front().x, hi = samples.front().x;
  for (const auto& s : samples) {
    lo = std::min(lo, s.x);
    hi = std::max(hi, s.x);
  }
  if (options.certify_range) std::tie(lo, hi) = *options.certify_range;
  if (lo < hi) {
    if (auto pole = find_pole(coeffs.den, lo, hi)) throw PoleInRange(*pole);
    coeffs.pole_free = true;
  }

  RationalFit fit;
  fit.coeffs = std::move(coeffs);
  const std::span<const double> num(fit.coeffs.num), den(fit.coeffs.den);
  fit.report = evaluate_fit(samples, [num, den](double x) { return pade_eval(num, den, x); });
  fit.report.residual_norm = sol.residual_norm;
  fit.report.condition_estimate = sol.condition;
  return fit;
}

std::optional<double> find_pole(std::span<const double> den, double lo, double hi) {
  if (den.empty()) throw ConfigError("denominator coefficients are empty");
  if (!(lo < hi)) throw ConfigError("certification range must satisfy lo < hi");
  const int n = kCertificationGrid;
  const double step = (hi - lo) / (n - 1);
  auto x_at = [&](int i) { return i == n - 1 ? hi : lo + step * i; };

  double prev_x = x_at(0);
  double prev_q = poly_eval(den, prev_x);
  if (prev_q == 0.0) return prev_x;
  for (int i = 1; i < n; ++i) {
    const double x = x_at(i);
    const double q = poly_eval(den, x);
    if (q == 0.0) return x;
    if ((q > 0.0) != (prev_q > 0.0)) {
      double a = prev_x, b = x;
      const bool a_positive = prev_q > 0.0;
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double qm = poly_eval(den, m);
        if (qm == 0.0) return m;
        ((qm > 0.0) == a_positive ? a : b) = m;
      }
      return 0.5 * (a + b);
    }
    prev_x = x;
    prev_q = q;
  }
  return std::nullopt;
}

bool certify_pole_free(const RationalCoeffs& coeffs, double lo, double hi) {
  return !find_pole(coeffs.den, lo, hi).has_value();
}

FitConfig canonical_config(FitTarget target) {
  FitConfig c;
  c.target = target;
  return c;
}

CoeffFile fit_canonical(const std::string& name) {
  // <tanh|sigm>_<taylor|pade>_<n>[_<m>]
  auto parse_int = [&](std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
      throw ConfigError("cannot parse order in '" + name + "'");
    return v;
  };
  std::vector<std::string_view> parts;
  std::string_view rest(name);
  while (true) {
    auto us = rest.find('_');
    parts.push_back(rest.substr(0, us));
    if (us == std::string_view::npos) break;
    rest.remove_prefix(us + 1);
  }
  if (parts.size() < 3 || (parts[0] != "tanh" && parts[0] != "sigm"))
    throw ConfigError("not a fittable catalog name: '" + name + "'");

  const FitConfig config = canonical_config(parts[0] == "tanh" ? FitTarget::tanh : FitTarget::sigmoid);
  const auto samples = sample_uniform(config);
  CoeffFile file;
  file.name = name;
  file.range = std::pair{config.range_lo, config.range_hi};
  if (parts[1] == "taylor" && parts.size() == 3) {
    auto fit = fit_taylor(samples, parse_int(parts[2]));
    file.data = std::move(fit.coeffs);
    file.report = fit.report;
  } else if (parts[1] == "pade" && parts.size() == 4) {
    auto fit = fit_pade(samples, parse_int(parts[2]), parse_int(parts[3]));
    file.data = std::move(fit.coeffs);
    file.report = fit.report;
  } else {
    throw ConfigError("not a fittable catalog name: '" + name + "'");
  }
  return file;
}

}  // namespace fastact
