// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>

#include "fastact/bench/micro.hpp"
#include "fastact/bench/report.hpp"
#include "fastact/bench/workload.hpp"
#include "fastact/catalog.hpp"
#include "fastact/comparators.hpp"
#include "fastact/fitting.hpp"
#include "fastact/random.hpp"
#include "support.hpp"

using namespace fastact;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double max_err(const ActivationSpec& a, const ActivationSpec& exact, double lo, double hi, int points,
               const std::function<bool(double)>& keep = {}) {
  double m = 0;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    if (keep && !keep(x)) continue;
    m = std::max(m, std::abs(a.value(x) - exact.value(x)));
  }
  return m;
}

Outcome error_envelopes() {
  const auto& c = Catalog::instance();
  const int n = 10001;
  const double fe512 = max_err(c.get("sigm_fastexp_512"), c.get("sigm"), -5.5, 5.5, n);
  const double uf = max_err(c.get("ultra_fast_sigmoid"), c.get("sigm"), -5.5, 5.5, n);
  const double fe2 = max_err(c.get("sigm_fastexp_2"), c.get("sigm"), -5.5, 5.5, n);
  auto outer = [](double x) { return std::abs(x) > 3; };
  const double pade = max_err(c.get("tanh_pade_4_4"), c.get("tanh"), -5.5, 5.5, n, outer);
  const double cont = max_err(c.get("tanh_cont_4"), c.get("tanh"), -5.5, 5.5, n, outer);
  return {fe512 < uf && uf < fe2 && pade < cont,
          "fastexp_512 " + fmt(fe512) + " < ultra_fast " + fmt(uf) + " < fastexp_2 " + fmt(fe2) +
              "; |x|>3: pade_4_4 " + fmt(pade) + " < cont_4 " + fmt(cont)};
}

Outcome fit_quality() {
  const double pade = fit_canonical("tanh_pade_4_4").report->max_abs_error;
  const double taylor = fit_canonical("tanh_taylor_9").report->max_abs_error;
  return {pade < 0.05 && taylor < 0.5, "tanh_pade_4_4 " + fmt(pade) + ", tanh_taylor_9 " + fmt(taylor)};
}

Outcome gradient_suite() {
  const auto& c = Catalog::instance();
  auto names = c.table_names();
  for (auto& n : c.comparator_names()) names.push_back(n);
  for (auto& n : c.auxiliary_names()) names.push_back(n);
  int checked = 0;
  std::string bad;
  for (const auto& n : names) {
    const auto& spec = c.get(n);
    if (!spec.gradient_checkable()) continue;
    ++checked;
    const auto m = support::gradient_mismatches(spec);
    if (!m.empty()) bad += " " + n + "@" + fmt(m.front().x);
  }
  return {bad.empty(), std::to_string(checked) + " entries checked" + (bad.empty() ? "" : ", mismatches:" + bad)};
}

Outcome micro_direction() {
  const auto& c = Catalog::instance();
  const auto r = bench::micro_bench({c.get("sigm"), c.get("tanh"), c.get("sigm_fastexp_512"), c.get("serp")}, {});
  const double relu = r[0].ns_per_call, sigm = r[1].ns_per_call, tanh = r[2].ns_per_call,
               fe = r[3].ns_per_call, serp = r[4].ns_per_call;
  return {sigm > 1.5 * relu && tanh > 1.5 * relu && fe < sigm && serp < tanh,
          "ns/call relu " + fmt(relu) + " sigm " + fmt(sigm) + " tanh " + fmt(tanh) + " sigm_fastexp_512 " + fmt(fe) +
              " serp " + fmt(serp)};
}

struct AutoencoderRuns {
  bench::WorkloadResult fe512, pade, fe2, w2v;
};

AutoencoderRuns autoencoder_runs() {
  bench::RunnerOptions o;
  o.workload.epochs = 10;
  o.workload.seed = 1;
  o.timing_repeats = 3;
  bench::WorkloadRunner runner(o);
  const auto id = nn::WorkloadId::autoencoder;
  AutoencoderRuns r;
  r.fe512 = runner.run(id, {"sigm_fastexp_512", std::nullopt}).result;
  r.fe2 = runner.run(id, {"sigm_fastexp_2", std::nullopt}).result;
  r.w2v = runner.run(id, {"word2vec", std::nullopt}).result;
  r.pade = runner.run(id, {std::nullopt, "tanh_pade_4_4"}).result;
  return r;
}

double or_nan(const std::optional<double>& v) { return v.value_or(std::nan("")); }

Outcome safe_equivalence(const AutoencoderRuns& r) {
  auto ok = [](const bench::WorkloadResult& w) {
    return w.loss_rel && *w.loss_rel >= 0.9 && *w.loss_rel <= 1.1 && w.time_rel && *w.time_rel < 1.0;
  };
  return {ok(r.fe512) && ok(r.pade),
          "sigm_fastexp_512 loss_rel " + fmt(or_nan(r.fe512.loss_rel)) + " time_rel " + fmt(or_nan(r.fe512.time_rel)) +
              "; tanh_pade_4_4 loss_rel " + fmt(or_nan(r.pade.loss_rel)) + " time_rel " +
              fmt(or_nan(r.pade.time_rel))};
}

Outcome ranged_speedup(const AutoencoderRuns& r) {
  const double t2 = or_nan(r.fe2.time_rel), t512 = or_nan(r.fe512.time_rel);
  return {t2 < t512 && t512 < 1.0, "time_rel sigm_fastexp_2 " + fmt(t2) + " < sigm_fastexp_512 " + fmt(t512)};
}

Outcome w2v_quantization(const AutoencoderRuns& r) {
  const auto table = build_w2v_table();
  Rng rng(7);
  std::set<double> distinct;
  for (int i = 0; i < 1000000; ++i) distinct.insert(w2v_sigmoid(rng.uniform(-8, 8), table));
  const double lw = or_nan(r.w2v.loss_rel), l512 = or_nan(r.fe512.loss_rel);
  return {distinct.size() <= 1002 && lw > l512,
          std::to_string(distinct.size()) + " distinct values; loss_rel word2vec " + fmt(lw) +
              " > sigm_fastexp_512 " + fmt(l512)};
}

Outcome gate_accounting() {
  nn::WorkloadOptions o;
  o.epochs = 1;
  o.limit = 2000;
  const auto& c = Catalog::instance();
  auto w = nn::prepare_workload(nn::WorkloadId::charrnn, {c.get("sigm"), c.get("tanh")}, o);
  const auto t = nn::train(w.model, *w.source, w.config);
  const auto& k = t.counters;
  return {k.hidden_steps > 0 && k.sigm_slot == 3 * k.hidden_steps && k.tanh_slot == 2 * k.hidden_steps,
          "hidden unit steps " + std::to_string(k.hidden_steps) + ", sigm slot " + std::to_string(k.sigm_slot) +
              ", tanh slot " + std::to_string(k.tanh_slot)};
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

Outcome divergence_handling() {
  const auto dir = support::scratch_dir("acceptance_nan");
  const auto trace = dir / "nan.jsonl";
  const auto r = support::run_command({FASTACT_CLI, "train", "--workload", "autoencoder", "--sigm", "nan", "--epochs",
                                       "1", "--limit", "256", "--no-baseline", "--out", trace.string()});
  if (r.exit_code != 0) return {false, "train exit code " + std::to_string(r.exit_code)};
  const auto lines = json_lines(support::read_file(trace));
  if (lines.empty()) return {false, "empty trace"};
  const auto& result = lines.back();
  const bool status_ok = result.value("status", "") == "nan" && result.contains("divergence_layer") &&
                         result["divergence_layer"].is_number_integer();
  const auto rep = support::run_command({FASTACT_CLI, "report", "--in", dir.string()});
  const bool row_ok = rep.exit_code == 0 && rep.out.find("NaN") != std::string::npos;
  return {status_ok && row_ok, "status " + result.value("status", "?") + " layer " +
                                   (result.contains("divergence_layer") ? result["divergence_layer"].dump() : "?") +
                                   ", report exit " + std::to_string(rep.exit_code)};
}

Outcome determinism() {
  const std::vector<std::string> args = {FASTACT_CLI, "train", "--workload", "autoencoder", "--sigm", "sigm_fastexp_512",
                                         "--epochs", "3", "--limit", "1000", "--seed", "11", "--no-timing"};
  const auto a = support::run_command(args), b = support::run_command(args);
  return {a.exit_code == 0 && b.exit_code == 0 && !a.out.empty() && a.out == b.out,
          std::to_string(a.out.size()) + " bytes, " + (a.out == b.out ? "identical" : "different")};
}

Outcome headroom() {
  bench::RunnerOptions o;
  o.timing_repeats = 3;
  bench::WorkloadRunner runner(o);
  const auto r = runner.run(nn::WorkloadId::convnet, {"identity", std::nullopt}).result;
  const double t = or_nan(r.time_rel);
  return {t < 0.95, "convnet time_rel identity/sigm " + fmt(t)};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << n << " " << name << ": " << o.detail << " (" << fmt(s) << " s)"
              << std::endl;
  };

  report(1, "error envelopes", error_envelopes);
  report(2, "fit quality", fit_quality);
  report(3, "gradient suite", gradient_suite);
  report(4, "micro-benchmark direction", micro_direction);

  std::optional<AutoencoderRuns> runs;
  std::string run_error;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    runs = autoencoder_runs();
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  std::cout << "autoencoder runs: "
            << fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) << " s" << std::endl;
  auto with_runs = [&](Outcome (*f)(const AutoencoderRuns&)) {
    return [&, f]() -> Outcome {
      if (!runs) return {false, "autoencoder runs failed: " + run_error};
      return f(*runs);
    };
  };
  report(5, "safe approximation equivalence", with_runs(safe_equivalence));
  report(6, "ranged approximation speedup", with_runs(ranged_speedup));
  report(7, "word2vec quantization", with_runs(w2v_quantization));
  report(8, "LSTM gate accounting", gate_accounting);
  report(9, "divergence handling", divergence_handling);
  report(10, "determinism", determinism);
  report(11, "headroom", headroom);

  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
