#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "icg/kernel.hpp"
#include "icg/processes.hpp"

namespace icg {

struct FiniteSimConfig {
  std::size_t N = 1;
  std::size_t T = 1;
  double theta = 0.0;
  std::uint64_t seed = 0;
  std::size_t replications = 1;
  std::size_t threads = 1;  // worker count; results do not depend on it
};

struct FiniteSimResult {
  std::size_t N = 0;
  std::vector<std::vector<double>> lambda_N;  // one path per replication
  std::vector<double> lambda_ref;             // continuum benchmark
  std::vector<double> sup_error;              // sup_t gap per replication
};

// Monte Carlo N-player run: per-agent Gaussian signals, posterior means
// accumulated in precision space, actions by the continuum cutoffs. Draws are
// keyed by (seed, replication, agent, period), so output is bit-identical for
// any thread count.
FiniteSimResult simulate_finite(const GameConfig& config,
                                const LearningSpec& spec,
                                const FiniteSimConfig& fsc);

struct ConcentrationRow {
  std::size_t N;
  double mean_sup_error;
  double p95_sup_error;
};

// Summarizes sup-errors across an N-grid; requires at least two results.
std::vector<ConcentrationRow> concentration_report(
    const std::vector<FiniteSimResult>& results);

// Deterministic substream draw: standard normal for the given coordinates.
double counter_normal(std::uint64_t seed, std::uint64_t rep, std::uint64_t agent,
                      std::uint64_t period);

}  // namespace icg
