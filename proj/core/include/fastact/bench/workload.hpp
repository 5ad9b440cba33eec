#pragma once

#include <map>
#include <optional>
#include <string>

#include "fastact/nn/workloads.hpp"

namespace fastact::bench {

/// Catalog names per slot, as given on the command line.
struct NameAssignment {
  std::optional<std::string> sigm;
  std::optional<std::string> tanh;

  friend bool operator==(const NameAssignment&, const NameAssignment&) = default;
};

/// One row of the results table. Loss and time of non-converged runs:
/// loss_abs is +inf (diverged) or NaN (nan); time fields are empty.
struct WorkloadResult {
  std::string workload;
  NameAssignment activations;
  nn::TrainStatus status = nn::TrainStatus::converged;
  double loss_abs = 0.0;
  std::optional<double> loss_rel;
  std::optional<double> time_abs_seconds;
  std::optional<double> time_rel;
  std::optional<std::string> choice;  ///< "safe" / "ranged"
  std::optional<std::size_t> divergence_layer;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const WorkloadResult&, const WorkloadResult&) = default;
};

/// Resolves a catalog name; ConfigError listing the catalog if unknown.
ActivationSpec resolve_activation(std::string_view name);
nn::SlotAssignment resolve_slots(const NameAssignment& names);

/// The exact-function assignment whose run the given one is measured
/// against: (sigm) or (tanh) for one-slot workloads, (sigm, tanh) for charrnn.
NameAssignment baseline_assignment(nn::WorkloadId id, const NameAssignment& names);
bool is_baseline(nn::WorkloadId id, const NameAssignment& names);

/// The designated picks: sigm_fastexp_512 and tanh_pade_4_4 are safe,
/// sigm_fastexp_2 and serp ranged; for charrnn the safe pair is
/// (sigm_fastexp_512, serp_clamp) and the ranged pair (sigm_fastexp_2, serp).
std::optional<std::string> choice_tag(nn::WorkloadId id, const NameAssignment& names);

/// Fills loss_rel / time_rel from a baseline row of the same workload
/// (same epochs and seed). Leaves them empty when the baseline did not
/// converge; loss_rel is +inf for a diverged row.
void apply_baseline(WorkloadResult& row, const WorkloadResult& baseline);

struct RunnerOptions {
  nn::WorkloadOptions workload;
  /// Each configuration is trained this many times; the fastest wall time
  /// is reported (losses are identical across repeats).
  std::size_t timing_repeats = 1;
};

struct WorkloadRun {
  WorkloadResult result;
  nn::TrainTrace trace;
};

/// Trains workloads and computes relative columns against the exact
/// baseline of the same session, running that baseline on first use.
class WorkloadRunner {
 public:
  explicit WorkloadRunner(RunnerOptions options) : options_(std::move(options)) {}

  /// Absolute columns only.
  WorkloadRun run_absolute(nn::WorkloadId id, const NameAssignment& names);
  /// Absolute and relative columns; the baseline is run implicitly if needed.
  WorkloadRun run(nn::WorkloadId id, const NameAssignment& names);

  const WorkloadRun& baseline(nn::WorkloadId id, const NameAssignment& names);

 private:
  RunnerOptions options_;
  std::map<std::string, WorkloadRun> baselines_;
};

}  // namespace fastact::bench
