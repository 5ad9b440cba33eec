#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fastact/bench/workload.hpp"

namespace fastact::bench {

/// Results table: Abs/Rel for loss and time plus the choice tag. Diverged
/// rows show "∞" for loss and "-" for time; NaN rows "NaN" and "-".
std::string render_table(const std::vector<WorkloadResult>& rows);

/// {"results": [...]}. Non-finite losses are written as the strings "inf"
/// and "nan".
std::string to_json(const std::vector<WorkloadResult>& rows);
/// Inverse of to_json; throws ParseError.
std::vector<WorkloadResult> results_from_json(std::string_view text);

std::string to_csv(const std::vector<WorkloadResult>& rows);

/// Recomputes relative columns of every row that has a baseline row
/// (same workload, slot, epochs and seed) in `rows`.
void recompute_relative(std::vector<WorkloadResult>& rows);

/// Reads result rows from a file or from every *.json / *.jsonl file of a
/// directory (sorted by name): report JSON documents, or train traces whose
/// "result" records are collected. Throws ConfigError if none are found.
std::vector<WorkloadResult> load_results(const std::filesystem::path& path);

/// Training trace as JSON lines: one "epoch" record per epoch, a "summary"
/// record, then a "result" record. With timing off, every wall-clock field
/// is omitted so repeated runs produce identical bytes.
std::string trace_json_lines(const nn::TrainTrace& trace, const WorkloadResult& result, bool timing);

}  // namespace fastact::bench
