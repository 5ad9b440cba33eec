// fastact: fit coefficients, emit error profiles, run micro-benchmarks,
// train the benchmark workloads and tabulate their results.
//
// Exit codes: 0 success (including a run that diverged), 2 usage or
// configuration error, 3 divergence with --fail-on-divergence.

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fastact/bench/error_profile.hpp"
#include "fastact/bench/micro.hpp"
#include "fastact/bench/report.hpp"
#include "fastact/bench/workload.hpp"
#include "fastact/catalog.hpp"
#include "fastact/fitting.hpp"

namespace {

using namespace fastact;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    throw ConfigError("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("range must be lo,hi (got '" + s + "')");
  const double lo = parse_number(std::string_view(s).substr(0, comma), "range");
  const double hi = parse_number(std::string_view(s).substr(comma + 1), "range");
  if (!(lo < hi)) throw ConfigError("empty range " + s);
  return {lo, hi};
}

std::pair<int, std::optional<int>> parse_order(const std::string& s) {
  const auto comma = s.find(',');
  auto to_int = [&](std::string_view part) {
    int v = 0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || p != part.data() + part.size() || part.empty() || v < 0)
      throw ConfigError("order must be n or n,m with nonnegative integers (got '" + s + "')");
    return v;
  };
  if (comma == std::string::npos) return {to_int(s), std::nullopt};
  return {to_int(std::string_view(s).substr(0, comma)), to_int(std::string_view(s).substr(comma + 1))};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

std::string report_line(const FitReport& r) {
  return "max_abs_error=" + format_double(r.max_abs_error) +
         " mean_abs_error=" + format_double(r.mean_abs_error) +
         " residual_norm=" + format_double(r.residual_norm) +
         " condition_estimate=" + format_double(r.condition_estimate);
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
  std::string target = "tanh";
  std::string form = "pade";
  std::string order = "4,4";
  std::string range = "-5.5,5.5";
  int samples = 5000;
  bool reweight = false;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  FitConfig cfg;
  if (a.target == "tanh")
    cfg.target = FitTarget::tanh;
  else if (a.target == "sigmoid" || a.target == "sigm")
    cfg.target = FitTarget::sigmoid;
  else
    throw ConfigError("--target must be tanh or sigmoid");
  std::tie(cfg.range_lo, cfg.range_hi) = parse_range(a.range);
  cfg.sample_count = a.samples;
  const auto [n, m] = parse_order(a.order);
  const auto samples = sample_uniform(cfg);

  CoeffFile file;
  const std::string prefix = cfg.target == FitTarget::tanh ? "tanh" : "sigm";
  file.range = std::pair{cfg.range_lo, cfg.range_hi};
  if (a.form == "taylor") {
    if (m) throw ConfigError("taylor fits take a single order");
    auto fit = fit_taylor(samples, n);
    file.name = prefix + "_taylor_" + std::to_string(n);
    file.data = std::move(fit.coeffs);
    file.report = fit.report;
  } else if (a.form == "pade") {
    if (!m) throw ConfigError("pade fits take --order n,m");
    PadeOptions opts;
    opts.reweight = a.reweight;
    auto fit = fit_pade(samples, n, *m, opts);
    file.name = prefix + "_pade_" + std::to_string(n) + "_" + std::to_string(*m);
    file.data = std::move(fit.coeffs);
    file.report = fit.report;
  } else {
    throw ConfigError("--form must be taylor or pade");
  }

  if (a.out.empty()) {
    std::cout << format_coeffs(file);
  } else {
    export_coeffs(file, a.out);
    std::cout << file.name << " " << report_line(*file.report) << "\n";
  }
  return kExitOk;
}

// --- err -------------------------------------------------------------------

struct ErrArgs {
  std::string fn;
  std::string baseline;
  std::string range = "-5.5,5.5";
  std::size_t grid = 1000;
  std::string out;
};

int cmd_err(const ErrArgs& a) {
  const ActivationSpec fn = bench::resolve_activation(a.fn);
  std::string base_name = a.baseline;
  if (base_name.empty()) {
    base_name = std::string(baseline_name(fn.family()));
    if (base_name.empty()) throw ConfigError("'" + a.fn + "' has no default baseline; pass --baseline");
  }
  const ActivationSpec base = bench::resolve_activation(base_name);
  const auto [lo, hi] = parse_range(a.range);
  const auto profile = bench::error_profile(fn, base, lo, hi, a.grid);

  char summary[256];
  std::snprintf(summary, sizeof summary, "%s vs %s on [%g, %g], %zu points: max_abs_error=%.17g at x=%.17g mean_abs_error=%.17g\n",
                profile.function_name.c_str(), profile.baseline_name.c_str(), lo, hi, a.grid,
                profile.max_abs_error, profile.argmax, profile.mean_abs_error);
  if (a.out.empty() || a.out == "-") {
    std::cout << bench::to_csv(profile);
    std::cerr << summary;
  } else {
    bench::write_csv(profile, a.out);
    std::cout << summary;
  }
  return kExitOk;
}

// --- bench-micro -----------------------------------------------------------

struct MicroArgs {
  std::vector<std::string> fns;
  std::size_t iterations = 10'000'000;
  std::size_t rounds = 5;
  std::string range = "-5,5";
  std::string format = "table";
  std::uint64_t seed = 42;
};

int cmd_micro(const MicroArgs& a) {
  std::vector<std::string> names = a.fns;
  if (names.empty()) {
    names = Catalog::instance().table_names();
    for (auto& n : Catalog::instance().comparator_names()) names.push_back(n);
  }
  std::vector<ActivationSpec> specs;
  for (const auto& n : names) specs.push_back(bench::resolve_activation(n));
  bench::MicroBenchConfig cfg;
  cfg.iterations = a.iterations;
  cfg.rounds = a.rounds;
  cfg.seed = a.seed;
  std::tie(cfg.lo, cfg.hi) = parse_range(a.range);
  const auto results = bench::micro_bench(specs, cfg);

  if (a.format == "json") {
    json arr = json::array();
    for (const auto& r : results)
      arr.push_back({{"function", r.function_name}, {"ns_per_call", r.ns_per_call},
                     {"relative_to_relu", r.relative_to_relu}, {"samples", r.samples},
                     {"input_distribution", r.input_distribution}, {"checksum", r.checksum}});
    std::cout << arr.dump(2) << "\n";
  } else if (a.format == "csv") {
    std::cout << "function,ns_per_call,relative_to_relu,samples,checksum\n";
    for (const auto& r : results)
      std::printf("%s,%.6g,%.6g,%zu,%.17g\n", r.function_name.c_str(), r.ns_per_call, r.relative_to_relu,
                  r.samples, r.checksum);
  } else if (a.format == "table") {
    std::printf("%-20s %10s %10s %22s\n", "function", "ns/call", "x relu", "checksum");
    for (const auto& r : results)
      std::printf("%-20s %10.3f %10.2f %22.10g\n", r.function_name.c_str(), r.ns_per_call,
                  r.relative_to_relu, r.checksum);
    std::printf("inputs: %s\n", results.front().input_distribution.c_str());
  } else {
    throw ConfigError("--format must be table, json or csv");
  }
  return kExitOk;
}

// --- train / infer ---------------------------------------------------------

struct WorkloadArgs {
  std::string workload;
  std::optional<std::string> sigm;
  std::optional<std::string> tanh;
  std::size_t epochs = 0;
  std::uint64_t seed = 1;
  std::string data = "synthetic";
  std::optional<std::size_t> limit;
  std::size_t batch_size = 64;
  bool output_activation = true;
};

nn::WorkloadOptions workload_options(const WorkloadArgs& a, nn::WorkloadId id) {
  nn::WorkloadOptions o;
  o.epochs = a.epochs;
  o.seed = a.seed;
  o.batch_size = a.batch_size;
  o.limit = a.limit;
  o.autoencoder_output_activation = a.output_activation;
  if (a.data == "mnist") {
    if (id == nn::WorkloadId::charrnn) throw ConfigError("charrnn reads a text file: --data <path>");
    const char* dir = std::getenv("FASTACT_DATA_DIR");
    if (!dir || !*dir) throw ConfigError("--data mnist needs FASTACT_DATA_DIR to point at the MNIST files");
    o.data_path = dir;
  } else if (a.data != "synthetic") {
    o.data_path = a.data;
  }
  return o;
}

struct TrainArgs : WorkloadArgs {
  std::string out;
  bool fail_on_divergence = false;
  bool no_timing = false;
  bool no_baseline = false;
  std::size_t timing_repeats = 1;
};

int cmd_train(const TrainArgs& a) {
  const auto id = nn::parse_workload(a.workload);
  const bench::NameAssignment names{a.sigm, a.tanh};
  bench::resolve_slots(names).validate(id);

  bench::RunnerOptions ro;
  ro.workload = workload_options(a, id);
  ro.timing_repeats = a.timing_repeats;
  bench::WorkloadRunner runner(ro);
  const bench::WorkloadRun run = a.no_baseline ? runner.run_absolute(id, names) : runner.run(id, names);

  write_text(a.out, bench::trace_json_lines(run.trace, run.result, !a.no_timing));

  const auto& r = run.result;
  std::cerr << r.workload << " [" << r.activations.sigm.value_or("-") << ", " << r.activations.tanh.value_or("-")
            << "]: " << nn::to_string(r.status);
  if (r.status == nn::TrainStatus::converged) {
    std::cerr << ", loss " << r.loss_abs;
    if (r.loss_rel) std::cerr << " (rel " << *r.loss_rel << ")";
    if (r.time_abs_seconds) std::cerr << ", " << *r.time_abs_seconds << " s";
    if (r.time_rel) std::cerr << " (rel " << *r.time_rel << ")";
  } else if (r.divergence_layer) {
    std::cerr << " at layer " << *r.divergence_layer << " (" << run.trace.divergence_stage << ")";
  }
  std::cerr << "\n";
  if (a.fail_on_divergence && r.status != nn::TrainStatus::converged) return kExitDiverged;
  return kExitOk;
}

struct InferArgs : WorkloadArgs {
  std::size_t repeat = 1000;
};

int cmd_infer(const InferArgs& a) {
  const auto id = nn::parse_workload(a.workload);
  const auto slots = bench::resolve_slots({a.sigm, a.tanh});
  auto w = nn::prepare_workload(id, slots, workload_options(a, id));
  const auto stats = nn::infer_benchmark(w.model, w.single_input, a.repeat);
  json j;
  j["workload"] = a.workload;
  j["sigm"] = a.sigm ? json(*a.sigm) : json(nullptr);
  j["tanh"] = a.tanh ? json(*a.tanh) : json(nullptr);
  j["repeat"] = stats.repeat;
  j["total_seconds"] = stats.total_seconds;
  j["mean_seconds"] = stats.mean_seconds();
  j["min_seconds"] = stats.min_seconds();
  std::cout << j.dump() << "\n";
  return kExitOk;
}

// --- report / catalog ------------------------------------------------------

struct ReportArgs {
  std::string in;
  std::string format = "table";
};

int cmd_report(const ReportArgs& a) {
  auto rows = bench::load_results(a.in);
  bench::recompute_relative(rows);
  if (a.format == "table")
    std::cout << bench::render_table(rows);
  else if (a.format == "json")
    std::cout << bench::to_json(rows);
  else if (a.format == "csv")
    std::cout << bench::to_csv(rows);
  else
    throw ConfigError("--format must be table, json or csv");
  return kExitOk;
}

int cmd_catalog(bool all) {
  const auto& cat = Catalog::instance();
  std::vector<std::string> names = cat.table_names();
  for (auto& n : cat.comparator_names()) names.push_back(n);
  if (all)
    for (auto& n : cat.auxiliary_names()) names.push_back(n);
  for (const auto& n : names) {
    const auto& spec = cat.get(n);
    std::string safety = "safe";
    if (spec.safety().ranged) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "ranged[%g,%g]", spec.safety().lo, spec.safety().hi);
      safety = buf;
    }
    std::printf("%-20s %-8s %-20s %s\n", n.c_str(), std::string(to_string(spec.family())).c_str(),
                std::string(to_string(spec.kind())).c_str(), safety.c_str());
  }
  return kExitOk;
}

void add_workload_options(CLI::App* cmd, WorkloadArgs& a) {
  cmd->add_option("--workload", a.workload, "convnet, autoencoder or charrnn")->required();
  cmd->add_option("--sigm", a.sigm, "activation for the sigmoid slot");
  cmd->add_option("--tanh", a.tanh, "activation for the tanh slot");
  cmd->add_option("--epochs", a.epochs, "epochs (default: 5 convnet, 10 autoencoder, 3 charrnn)");
  cmd->add_option("--seed", a.seed, "model, data and batch-order seed");
  cmd->add_option("--data", a.data, "synthetic, mnist (uses FASTACT_DATA_DIR), or a path");
  cmd->add_option("--limit", a.limit, "images, or characters for charrnn");
  cmd->add_option("--batch-size", a.batch_size, "minibatch size");
  cmd->add_option("--output-activation", a.output_activation,
                  "autoencoder: apply the activation on the output layer too");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast activation-function approximations: fitting, error analysis and benchmarks"};
  app.require_subcommand(1);
  std::uint64_t unused_seed = 0;

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "least-squares fit of a Taylor or Pade approximant");
  c_fit->add_option("--target", fit.target, "tanh or sigmoid");
  c_fit->add_option("--form", fit.form, "taylor or pade");
  c_fit->add_option("--order", fit.order, "n (taylor) or n,m (pade)");
  c_fit->add_option("--range", fit.range, "fit range lo,hi");
  c_fit->add_option("--samples", fit.samples, "uniform sample count");
  c_fit->add_flag("--reweight", fit.reweight, "second pass weighted by 1/|Q|");
  c_fit->add_option("--out", fit.out, "coefficient file to write");
  c_fit->add_option("--seed", unused_seed, "accepted for uniformity; fitting is deterministic");

  ErrArgs err;
  auto* c_err = app.add_subcommand("err", "absolute error profile against an exact function");
  c_err->add_option("--fn", err.fn, "approximation")->required();
  c_err->add_option("--baseline", err.baseline, "reference function (default: sigm or tanh by family)");
  c_err->add_option("--range", err.range, "lo,hi");
  c_err->add_option("--grid", err.grid, "grid points");
  c_err->add_option("--out", err.out, "CSV file (default: stdout)");
  c_err->add_option("--seed", unused_seed, "accepted for uniformity; profiles are deterministic");

  MicroArgs micro;
  auto* c_micro = app.add_subcommand("bench-micro", "time scalar f32 evaluation per call");
  c_micro->add_option("--fn", micro.fns, "functions (default: the whole table)")->delimiter(',');
  c_micro->add_option("--iterations", micro.iterations, "calls per function per round (>= 1e6)");
  c_micro->add_option("--rounds", micro.rounds, "rounds; the fastest is reported");
  c_micro->add_option("--range", micro.range, "input range lo,hi");
  c_micro->add_option("--format", micro.format, "table, json or csv");
  c_micro->add_option("--seed", micro.seed, "input generator seed");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "train a workload and emit its trace as JSON lines");
  add_workload_options(c_train, train);
  c_train->add_option("--out", train.out, "trace file (default: stdout)");
  c_train->add_flag("--fail-on-divergence", train.fail_on_divergence, "exit 3 if the run diverges");
  c_train->add_flag("--no-timing", train.no_timing, "omit wall-clock fields from the trace");
  c_train->add_flag("--no-baseline", train.no_baseline, "skip the exact-function run; no Rel columns");
  c_train->add_option("--timing-repeats", train.timing_repeats, "train n times, keep the fastest");

  InferArgs infer;
  auto* c_infer = app.add_subcommand("infer", "time sequential single-example forward passes");
  add_workload_options(c_infer, infer);
  c_infer->add_option("--repeat", infer.repeat, "number of inferences");

  ReportArgs report;
  auto* c_report = app.add_subcommand("report", "tabulate result records");
  c_report->add_option("--in", report.in, "results directory or file")->required();
  c_report->add_option("--format", report.format, "table, json or csv");
  c_report->add_option("--seed", unused_seed, "accepted for uniformity");

  bool catalog_all = false;
  auto* c_catalog = app.add_subcommand("catalog", "list activation names");
  c_catalog->add_flag("--all", catalog_all, "include auxiliary entries");
  c_catalog->add_option("--seed", unused_seed, "accepted for uniformity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_fit) return cmd_fit(fit);
    if (*c_err) return cmd_err(err);
    if (*c_micro) return cmd_micro(micro);
    if (*c_train) return cmd_train(train);
    if (*c_infer) return cmd_infer(infer);
    if (*c_report) return cmd_report(report);
    if (*c_catalog) return cmd_catalog(catalog_all);
  } catch (const PoleInRange& e) {
    std::cerr << "error: pole in fit range at x = " << format_double(e.location()) << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
