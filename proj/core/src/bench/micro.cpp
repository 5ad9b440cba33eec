#include "fastact/bench/micro.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "fastact/random.hpp"

namespace fastact::bench {
namespace {

using Clock = std::chrono::steady_clock;

// Minimum measured span per round, in clock ticks.
constexpr double kMinTicks = 1000.0;

template <class K>
[[gnu::noinline]] double run_kernel(const K& k, const std::vector<float>& inputs, std::size_t calls) {
  float acc0 = 0.0f, acc1 = 0.0f, acc2 = 0.0f, acc3 = 0.0f;
  const float* x = inputs.data();
  const std::size_t n = inputs.size();
  std::size_t done = 0;
  while (done < calls) {
    const std::size_t len = std::min(n, calls - done);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
      acc0 += k.value(x[i]);
      acc1 += k.value(x[i + 1]);
      acc2 += k.value(x[i + 2]);
      acc3 += k.value(x[i + 3]);
    }
    for (; i < len; ++i) acc0 += k.value(x[i]);
    done += len;
  }
  return static_cast<double>(acc0) + acc1 + acc2 + acc3;
}

struct Timing {
  double ns_per_call;
  double checksum;
};

Timing time_function(const ActivationSpec& fn, const std::vector<float>& inputs,
                     const MicroBenchConfig& config) {
  double best = 0.0, checksum = 0.0;
  for (std::size_t r = 0; r < config.rounds; ++r) {
    const auto start = Clock::now();
    const double sum = fn.visit([&](const auto& k) { return run_kernel(k, inputs, config.iterations); });
    const auto ticks = static_cast<double>((Clock::now() - start).count());
    if (ticks < kMinTicks)
      throw ConfigError("timer resolution insufficient for '" + fn.name() +
                        "'; increase the iteration count");
    const double ns = std::chrono::duration<double, std::nano>(Clock::duration(1)).count() * ticks /
                      static_cast<double>(config.iterations);
    if (r == 0 || ns < best) best = ns;
    checksum = sum;
  }
  return {best, checksum};
}

}  // namespace

void MicroBenchConfig::validate() const {
  if (iterations < 1'000'000) throw ConfigError("micro-benchmark needs at least 1e6 iterations per function");
  if (!(lo < hi)) throw ConfigError("empty input range");
  if (rounds == 0 || input_count == 0) throw ConfigError("rounds and input count must be positive");
}

std::vector<MicroBenchResult> micro_bench(const std::vector<ActivationSpec>& functions,
                                          const MicroBenchConfig& config) {
  config.validate();
  std::vector<float> inputs(config.input_count);
  Rng rng(config.seed);
  for (auto& x : inputs) x = static_cast<float>(rng.uniform(config.lo, config.hi));

  char dist[96];
  std::snprintf(dist, sizeof dist, "uniform[%g,%g] n=%zu seed=%llu", config.lo, config.hi,
                config.input_count, static_cast<unsigned long long>(config.seed));

  const auto relu = ActivationSpec::exact(ExactFunction::relu);
  const Timing ref = time_function(relu, inputs, config);

  std::vector<MicroBenchResult> out;
  out.push_back({relu.name(), ref.ns_per_call, 1.0, config.iterations, dist, ref.checksum});
  for (const auto& fn : functions) {
    if (fn.name() == relu.name()) continue;  // already the reference row
    const Timing t = time_function(fn, inputs, config);
    out.push_back({fn.name(), t.ns_per_call, t.ns_per_call / ref.ns_per_call, config.iterations, dist,
                   t.checksum});
  }
  return out;
}

}  // namespace fastact::bench
