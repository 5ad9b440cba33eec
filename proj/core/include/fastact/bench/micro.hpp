#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fastact/activation.hpp"

namespace fastact::bench {

struct MicroBenchConfig {
  std::size_t iterations = 10'000'000;  ///< calls per function per round, >= 1e6
  double lo = -5.0;
  double hi = 5.0;
  std::size_t rounds = 5;         ///< the fastest round is reported
  std::size_t input_count = 1 << 14;
  std::uint64_t seed = 42;

  void validate() const;
};

struct MicroBenchResult {
  std::string function_name;
  double ns_per_call = 0.0;
  double relative_to_relu = 0.0;
  std::size_t samples = 0;  ///< calls per round
  std::string input_distribution;
  double checksum = 0.0;  ///< sum of all f32 outputs of one round
};

/// Times f32 evaluation of each function over a pre-generated uniform input
/// buffer. relu is always measured first as the reference; the other
/// functions follow in order. Throws ConfigError when the measured time is
/// too short for the clock.
std::vector<MicroBenchResult> micro_bench(const std::vector<ActivationSpec>& functions,
                                          const MicroBenchConfig& config);

}  // namespace fastact::bench
