#include "fastact/catalog.hpp"

#include <charconv>
#include <limits>

#include "fastact/error.hpp"
#include "fastact/fitting.hpp"

namespace fastact {
namespace {

constexpr double kFitLo = -5.5;
constexpr double kFitHi = 5.5;

std::optional<long> parametric_suffix(std::string_view name, std::string_view prefix) {
  if (!name.starts_with(prefix)) return std::nullopt;
  auto digits = name.substr(prefix.size());
  long v = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (digits.empty() || ec != std::errc{} || p != digits.data() + digits.size()) return std::nullopt;
  return v;
}

}  // namespace

Catalog::Catalog() {
  for (auto name : shipped_coeff_names()) {
    auto imported = parse_coeffs(shipped_coeff_text(name));
    coeffs_.emplace(std::string(name), std::move(imported.file));
  }
  auto poly = [&](std::string_view name) { return std::get<PolyCoeffs>(shipped_coeffs(name).data); };
  auto rational = [&](std::string_view name) {
    auto r = std::get<RationalCoeffs>(shipped_coeffs(name).data);
    if (!certify_pole_free(r, kFitLo, kFitHi))
      throw ConfigError("shipped coefficients '" + std::string(name) + "' have a pole in the fit range");
    r.pole_free = true;
    return r;
  };
  const Safety ranged = Safety::ranged_on(kFitLo, kFitHi);

  add(ActivationSpec::exact(ExactFunction::relu));
  add(ActivationSpec::exact(ExactFunction::sigm));
  add(ActivationSpec::exact(ExactFunction::tanh));
  add(ActivationSpec::exact(ExactFunction::identity));
  add(ActivationSpec::relu_branchless());

  add(ActivationSpec::fastexp(2));
  add(ActivationSpec::fastexp(512));
  add(ActivationSpec::taylor("sigm_taylor_9", Family::sigmoid, poly("sigm_taylor_9"), ranged));
  add(ActivationSpec::pade("sigm_pade_4_4", Family::sigmoid, rational("sigm_pade_4_4"), ranged));

  add(ActivationSpec::continued_fraction(4));
  add(ActivationSpec::taylor("tanh_taylor_9", Family::tanh, poly("tanh_taylor_9"), ranged));
  // Safe variant: input frozen outside the fit range, output clamped to [-1, 1].
  add(ActivationSpec::pade("tanh_pade_4_4", Family::tanh, rational("tanh_pade_4_4"), Safety::safe(),
                           RationalClamp{kFitLo, kFitHi, -1.0, 1.0}));
  add(ActivationSpec::pade("tanh_pade_4_4_raw", Family::tanh, rational("tanh_pade_4_4"), ranged));
  add(ActivationSpec::serpentine());
  add(ActivationSpec::serpentine_clamped());

  add(ActivationSpec::ultra_fast());
  add(ActivationSpec::word2vec(std::make_shared<const LookupTable>(build_w2v_table())));

  // Fault injection: NaN everywhere.
  add(ActivationSpec::custom(
      "nan", Family::any, [](double) { return std::numeric_limits<double>::quiet_NaN(); },
      [](double) { return std::numeric_limits<double>::quiet_NaN(); }));
}

void Catalog::add(ActivationSpec spec) {
  auto name = spec.name();
  if (!entries_.emplace(name, std::move(spec)).second)
    throw ConfigError("duplicate catalog name '" + name + "'");
}

const Catalog& Catalog::instance() {
  static const Catalog catalog;
  return catalog;
}

const ActivationSpec& Catalog::get(std::string_view name) const {
  if (auto it = entries_.find(name); it != entries_.end()) return it->second;
  std::string msg = "unknown activation '" + std::string(name) + "'; known:";
  for (const auto& n : table_names()) msg += " " + n;
  for (const auto& n : comparator_names()) msg += " " + n;
  throw ConfigError(msg);
}

std::optional<ActivationSpec> Catalog::find(std::string_view name) const {
  if (auto it = entries_.find(name); it != entries_.end()) return it->second;
  try {
    if (auto n = parametric_suffix(name, "tanh_cont_"); n && *n >= 1 && *n <= 1000)
      return ActivationSpec::continued_fraction(static_cast<int>(*n));
    if (auto n = parametric_suffix(name, "sigm_fastexp_")) return ActivationSpec::fastexp(*n);
  } catch (const ConfigError&) {
  }
  return std::nullopt;
}

std::vector<std::string> Catalog::table_names() const {
  return {"relu",          "sigm",        "sigm_fastexp_2", "sigm_fastexp_512",
          "sigm_taylor_9", "sigm_pade_4_4", "tanh",         "tanh_cont_4",
          "tanh_taylor_9", "tanh_pade_4_4", "serp",         "serp_clamp"};
}

std::vector<std::string> Catalog::comparator_names() const { return {"ultra_fast_sigmoid", "word2vec"}; }

std::vector<std::string> Catalog::auxiliary_names() const {
  return {"identity", "relu_sum", "tanh_pade_4_4_raw", "nan"};
}

const CoeffFile& Catalog::shipped_coeffs(std::string_view name) const {
  auto it = coeffs_.find(name);
  if (it == coeffs_.end()) throw ConfigError("no shipped coefficients for '" + std::string(name) + "'");
  return it->second;
}

std::string_view baseline_name(Family family) {
  switch (family) {
    case Family::sigmoid: return "sigm";
    case Family::tanh: return "tanh";
    case Family::relu: return "relu";
    default: return {};
  }
}

}  // namespace fastact
