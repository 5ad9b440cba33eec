#include "fastact/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

namespace fastact::bench {
namespace {

using json = nlohmann::ordered_json;

json number_or_marker(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ParseError("expected a number, \"inf\" or \"nan\", got " + j.dump());
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json opt_number(const std::optional<double>& v) { return v ? number_or_marker(*v) : json(nullptr); }

json row_to_json(const WorkloadResult& r) {
  json j;
  j["workload"] = r.workload;
  j["sigm"] = opt(r.activations.sigm);
  j["tanh"] = opt(r.activations.tanh);
  j["status"] = nn::to_string(r.status);
  j["loss_abs"] = number_or_marker(r.loss_abs);
  j["loss_rel"] = opt_number(r.loss_rel);
  j["time_abs_seconds"] = opt_number(r.time_abs_seconds);
  j["time_rel"] = opt_number(r.time_rel);
  j["choice"] = opt(r.choice);
  j["divergence_layer"] = opt(r.divergence_layer);
  j["epochs"] = r.epochs;
  j["seed"] = r.seed;
  return j;
}

nn::TrainStatus status_from(const std::string& s) {
  for (auto st : {nn::TrainStatus::converged, nn::TrainStatus::diverged, nn::TrainStatus::nan})
    if (s == nn::to_string(st)) return st;
  throw ParseError("unknown status '" + s + "'");
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

std::optional<double> opt_double(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return number_from(j[key]);
}

WorkloadResult row_from_json(const json& j) {
  try {
    WorkloadResult r;
    r.workload = j.at("workload").get<std::string>();
    r.activations.sigm = opt_string(j, "sigm");
    r.activations.tanh = opt_string(j, "tanh");
    r.status = status_from(j.at("status").get<std::string>());
    r.loss_abs = number_from(j.at("loss_abs"));
    r.loss_rel = opt_double(j, "loss_rel");
    r.time_abs_seconds = opt_double(j, "time_abs_seconds");
    r.time_rel = opt_double(j, "time_rel");
    r.choice = opt_string(j, "choice");
    if (j.contains("divergence_layer") && !j["divergence_layer"].is_null())
      r.divergence_layer = j["divergence_layer"].get<std::size_t>();
    r.epochs = j.value("epochs", std::size_t{0});
    r.seed = j.value("seed", std::uint64_t{0});
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed result record: ") + e.what());
  }
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::optional<nn::WorkloadId> workload_id(const std::string& name) {
  try {
    return nn::parse_workload(name);
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

}  // namespace

std::string render_table(const std::vector<WorkloadResult>& rows) {
  const std::vector<std::string> header = {"workload", "sigm", "tanh", "loss_abs", "loss_rel",
                                           "time_s", "time_rel", "choice"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> c = {r.workload, r.activations.sigm.value_or("-"),
                                  r.activations.tanh.value_or("-")};
    switch (r.status) {
      case nn::TrainStatus::converged:
        c.push_back(fmt("%.4g", r.loss_abs));
        c.push_back(r.loss_rel ? fmt("%.3f", *r.loss_rel) : "-");
        c.push_back(r.time_abs_seconds ? fmt("%.4g", *r.time_abs_seconds) : "-");
        c.push_back(r.time_rel ? fmt("%.3f", *r.time_rel) : "-");
        break;
      case nn::TrainStatus::diverged:
        c.insert(c.end(), {"∞", "∞", "-", "-"});
        break;
      case nn::TrainStatus::nan:
        c.insert(c.end(), {"NaN", "-", "-", "-"});
        break;
    }
    c.push_back(r.choice.value_or(""));
    cells.push_back(std::move(c));
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    width[i] = header[i].size();
    for (const auto& c : cells) width[i] = std::max(width[i], display_width(c[i]));
  }
  auto line = [&](const std::vector<std::string>& c) {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const bool numeric = i >= 3 && i <= 6;
      const std::string pad(width[i] - display_width(c[i]), ' ');
      if (i) out += "  ";
      out += numeric ? pad + c[i] : c[i] + (i + 1 < c.size() ? pad : "");
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  for (const auto& c : cells) out += line(c);
  return out;
}

std::string to_json(const std::vector<WorkloadResult>& rows) {
  json doc;
  doc["results"] = json::array();
  for (const auto& r : rows) doc["results"].push_back(row_to_json(r));
  return doc.dump(2) + "\n";
}

std::vector<WorkloadResult> results_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("results") || !doc["results"].is_array())
    throw ParseError("expected an object with a \"results\" array");
  std::vector<WorkloadResult> rows;
  for (const auto& j : doc["results"]) rows.push_back(row_from_json(j));
  return rows;
}

std::string to_csv(const std::vector<WorkloadResult>& rows) {
  std::string out = "workload,sigm,tanh,status,loss_abs,loss_rel,time_abs_seconds,time_rel,choice\n";
  auto num = [](std::optional<double> v) {
    if (!v) return std::string();
    if (std::isnan(*v)) return std::string("nan");
    if (std::isinf(*v)) return std::string(*v > 0 ? "inf" : "-inf");
    return fmt("%.17g", *v);
  };
  for (const auto& r : rows) {
    out += r.workload + "," + r.activations.sigm.value_or("") + "," + r.activations.tanh.value_or("") +
           "," + nn::to_string(r.status) + "," + num(r.loss_abs) + "," + num(r.loss_rel) + "," +
           num(r.time_abs_seconds) + "," + num(r.time_rel) + "," + r.choice.value_or("") + "\n";
  }
  return out;
}

void recompute_relative(std::vector<WorkloadResult>& rows) {
  for (auto& row : rows) {
    const auto id = workload_id(row.workload);
    if (!id) continue;
    const NameAssignment base = baseline_assignment(*id, row.activations);
    auto it = std::find_if(rows.begin(), rows.end(), [&](const WorkloadResult& b) {
      return b.workload == row.workload && b.activations == base && b.epochs == row.epochs &&
             b.seed == row.seed;
    });
    if (it == rows.end()) continue;
    const WorkloadResult baseline = *it;
    apply_baseline(row, baseline);
  }
}

std::vector<WorkloadResult> load_results(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      const auto ext = e.path().extension();
      if (e.is_regular_file() && (ext == ".json" || ext == ".jsonl")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw ConfigError("'" + path.string() + "' does not exist");
  }

  std::vector<WorkloadResult> rows;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json doc = json::parse(text, nullptr, false);
    if (!doc.is_discarded() && doc.is_object() && doc.contains("results")) {
      for (auto& r : results_from_json(text)) rows.push_back(std::move(r));
      continue;
    }
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded()) throw ParseError("'" + f.string() + "': invalid JSON line");
      if (rec.is_object() && rec.value("type", "") == "result") rows.push_back(row_from_json(rec));
    }
  }
  if (rows.empty()) throw ConfigError("no result records found in '" + path.string() + "'");
  return rows;
}

std::string trace_json_lines(const nn::TrainTrace& trace, const WorkloadResult& result, bool timing) {
  std::string out;
  for (const auto& e : trace.epochs) {
    json j;
    j["type"] = "epoch";
    j["epoch"] = e.epoch;
    j["loss"] = number_or_marker(e.loss);
    if (timing) j["cumulative_seconds"] = e.cumulative_seconds;
    out += j.dump() + "\n";
  }
  json s;
  s["type"] = "summary";
  s["status"] = nn::to_string(trace.status);
  if (timing) s["total_seconds"] = trace.total_seconds;
  s["final_loss"] = number_or_marker(trace.final_loss);
  if (trace.initial_loss) s["initial_loss"] = number_or_marker(*trace.initial_loss);
  s["divergence_layer"] = opt(trace.divergence_layer);
  if (!trace.divergence_stage.empty()) s["divergence_stage"] = trace.divergence_stage;
  s["activation_calls"] = {{"sigm_slot", trace.counters.sigm_slot},
                           {"tanh_slot", trace.counters.tanh_slot},
                           {"hidden_unit_steps", trace.counters.hidden_steps}};
  out += s.dump() + "\n";

  WorkloadResult r = result;
  if (!timing) {
    r.time_abs_seconds.reset();
    r.time_rel.reset();
  }
  json rec;
  rec["type"] = "result";
  rec.update(row_to_json(r));
  out += rec.dump() + "\n";
  return out;
}

}  // namespace fastact::bench
