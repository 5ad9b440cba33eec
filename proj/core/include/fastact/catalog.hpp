#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastact/activation.hpp"
#include "fastact/coeffs.hpp"

namespace fastact {

/// Catalog of exact baselines and approximations, keyed by stable names.
///
/// Table names (the benchmark matrix): relu, sigm, sigm_fastexp_2,
/// sigm_fastexp_512, sigm_taylor_9, sigm_pade_4_4, tanh, tanh_cont_4,
/// tanh_taylor_9, tanh_pade_4_4, serp, serp_clamp; comparators:
/// ultra_fast_sigmoid, word2vec. Auxiliary entries (identity, relu_sum,
/// tanh_pade_4_4_raw, nan) are resolvable but only listed on request.
///
/// Parametric names tanh_cont_<n> and sigm_fastexp_<n> are built on demand.
class Catalog {
 public:
  /// Built once from the shipped coefficient files; immutable afterwards.
  static const Catalog& instance();

  /// Throws ConfigError listing the table names when the name is unknown.
  const ActivationSpec& get(std::string_view name) const;
  std::optional<ActivationSpec> find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }

  std::vector<std::string> table_names() const;
  std::vector<std::string> comparator_names() const;
  std::vector<std::string> auxiliary_names() const;

  /// Shipped coefficients for a fitted entry (e.g. "tanh_pade_4_4").
  const CoeffFile& shipped_coeffs(std::string_view name) const;

 private:
  Catalog();
  void add(ActivationSpec spec);

  std::map<std::string, ActivationSpec, std::less<>> entries_;
  std::map<std::string, CoeffFile, std::less<>> coeffs_;
};

/// Raw text of a shipped coefficient file, empty if there is none.
std::string_view shipped_coeff_text(std::string_view name);
std::vector<std::string_view> shipped_coeff_names();

/// Exact function an entry of the given family replaces ("sigm" / "tanh" /
/// "relu"); empty for identity/any.
std::string_view baseline_name(Family family);

}  // namespace fastact
