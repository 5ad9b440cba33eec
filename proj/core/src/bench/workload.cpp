#include "fastact/bench/workload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fastact/catalog.hpp"

namespace fastact::bench {
namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

bool names_are(const NameAssignment& n, std::optional<std::string_view> s, std::optional<std::string_view> t) {
  auto eq = [](const std::optional<std::string>& a, std::optional<std::string_view> b) {
    return a.has_value() == b.has_value() && (!a || *a == *b);
  };
  return eq(n.sigm, s) && eq(n.tanh, t);
}

std::string key(nn::WorkloadId id, const NameAssignment& names) {
  return nn::to_string(id) + "|" + names.sigm.value_or("-") + "|" + names.tanh.value_or("-");
}

}  // namespace

ActivationSpec resolve_activation(std::string_view name) {
  const auto& cat = Catalog::instance();
  if (auto spec = cat.find(name)) return *spec;
  auto names = cat.table_names();
  for (auto& n : cat.comparator_names()) names.push_back(n);
  throw ConfigError("unknown activation '" + std::string(name) + "'; available: " + join(names));
}

nn::SlotAssignment resolve_slots(const NameAssignment& names) {
  nn::SlotAssignment slots;
  if (names.sigm) slots.sigm = resolve_activation(*names.sigm);
  if (names.tanh) slots.tanh = resolve_activation(*names.tanh);
  return slots;
}

NameAssignment baseline_assignment(nn::WorkloadId id, const NameAssignment& names) {
  if (id == nn::WorkloadId::charrnn) return {"sigm", "tanh"};
  if (names.tanh && !names.sigm) return {std::nullopt, "tanh"};
  return {"sigm", std::nullopt};
}

bool is_baseline(nn::WorkloadId id, const NameAssignment& names) {
  return names == baseline_assignment(id, names);
}

std::optional<std::string> choice_tag(nn::WorkloadId id, const NameAssignment& n) {
  if (id == nn::WorkloadId::charrnn) {
    if (names_are(n, "sigm_fastexp_512", "serp_clamp")) return "safe";
    if (names_are(n, "sigm_fastexp_2", "serp")) return "ranged";
    return std::nullopt;
  }
  if (names_are(n, "sigm_fastexp_512", std::nullopt) || names_are(n, std::nullopt, "tanh_pade_4_4"))
    return "safe";
  if (names_are(n, "sigm_fastexp_2", std::nullopt) || names_are(n, std::nullopt, "serp")) return "ranged";
  return std::nullopt;
}

void apply_baseline(WorkloadResult& row, const WorkloadResult& baseline) {
  row.loss_rel.reset();
  row.time_rel.reset();
  if (baseline.status != nn::TrainStatus::converged) return;
  switch (row.status) {
    case nn::TrainStatus::converged:
      row.loss_rel = row.loss_abs / baseline.loss_abs;
      if (row.time_abs_seconds && baseline.time_abs_seconds && *baseline.time_abs_seconds > 0.0)
        row.time_rel = *row.time_abs_seconds / *baseline.time_abs_seconds;
      break;
    case nn::TrainStatus::diverged:
      row.loss_rel = std::numeric_limits<double>::infinity();
      break;
    case nn::TrainStatus::nan:
      break;
  }
}

WorkloadRun WorkloadRunner::run_absolute(nn::WorkloadId id, const NameAssignment& names) {
  const auto slots = resolve_slots(names);
  slots.validate(id);

  WorkloadRun run;
  const std::size_t repeats = std::max<std::size_t>(1, options_.timing_repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    auto w = nn::prepare_workload(id, slots, options_.workload);
    nn::TrainTrace trace = nn::train(w.model, *w.source, w.config);
    if (r == 0 || trace.total_seconds < run.trace.total_seconds) {
      run.result.epochs = w.config.epochs;
      run.trace = std::move(trace);
    }
    if (run.trace.status != nn::TrainStatus::converged) break;
  }

  auto& res = run.result;
  res.workload = nn::to_string(id);
  res.activations = names;
  res.seed = options_.workload.seed;
  res.status = run.trace.status;
  res.divergence_layer = run.trace.divergence_layer;
  res.choice = choice_tag(id, names);
  switch (res.status) {
    case nn::TrainStatus::converged:
      res.loss_abs = run.trace.final_loss;
      res.time_abs_seconds = run.trace.total_seconds;
      break;
    case nn::TrainStatus::diverged: res.loss_abs = std::numeric_limits<double>::infinity(); break;
    case nn::TrainStatus::nan: res.loss_abs = std::numeric_limits<double>::quiet_NaN(); break;
  }
  return run;
}

const WorkloadRun& WorkloadRunner::baseline(nn::WorkloadId id, const NameAssignment& names) {
  const NameAssignment base = baseline_assignment(id, names);
  const std::string k = key(id, base);
  auto it = baselines_.find(k);
  if (it == baselines_.end()) {
    WorkloadRun run = run_absolute(id, base);
    apply_baseline(run.result, run.result);
    it = baselines_.emplace(k, std::move(run)).first;
  }
  return it->second;
}

WorkloadRun WorkloadRunner::run(nn::WorkloadId id, const NameAssignment& names) {
  resolve_slots(names).validate(id);
  const WorkloadRun& base = baseline(id, names);
  if (is_baseline(id, names)) return base;
  WorkloadRun run = run_absolute(id, names);
  apply_baseline(run.result, base.result);
  return run;
}

}  // namespace fastact::bench
