#include "fastact/comparators.hpp"

#include <cmath>

#include "fastact/error.hpp"

namespace fastact {

LookupTable::LookupTable(std::vector<double> values, double max_exp)
    : values_(std::move(values)), max_exp_(max_exp) {
  if (values_.size() < 2) throw ConfigError("lookup table needs at least 2 entries");
  if (!(max_exp_ > 0.0) || !std::isfinite(max_exp_)) throw ConfigError("max_exp must be > 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0 && values_[i] < 1.0))
      throw ConfigError("lookup table values must lie in (0, 1)");
    if (i > 0 && values_[i] < values_[i - 1])
      throw ConfigError("lookup table values must be nondecreasing");
  }
  values_f32_.assign(values_.begin(), values_.end());
  scale_ = static_cast<double>(values_.size()) / (2.0 * max_exp_);
}

LookupTable build_w2v_table(std::size_t table_size, double max_exp, TableSampling sampling) {
  if (table_size < 2) throw ConfigError("table_size must be >= 2");
  if (!(max_exp > 0.0)) throw ConfigError("max_exp must be > 0");
  const double offset = sampling == TableSampling::midpoint ? 0.5 : 0.0;
  std::vector<double> values(table_size);
  for (std::size_t i = 0; i < table_size; ++i) {
    // word2vec.c: expTable[i] = exp((i / (real)EXP_TABLE_SIZE * 2 - 1) * MAX_EXP);
    //             expTable[i] = expTable[i] / (expTable[i] + 1);
    const double t = (static_cast<double>(i) + offset) / static_cast<double>(table_size);
    const double e = std::exp((t * 2.0 - 1.0) * max_exp);
    values[i] = e / (e + 1.0);
  }
  return LookupTable(std::move(values), max_exp);
}

std::vector<double> LookupTable::step_edges() const {
  std::vector<double> edges(values_.size() + 1);
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = static_cast<double>(i) / scale_ - max_exp_;
  return edges;
}

}  // namespace fastact
