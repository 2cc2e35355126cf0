#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entcap/model.hpp"

namespace entcap {

enum class CapacityMode { exact, truncated, sampled };
std::string_view mode_name(CapacityMode mode);
CapacityMode parse_mode(std::string_view name);

// Called once per evaluated state, in deterministic order.
using StateRecordSink = std::function<void(std::uint64_t index, const std::vector<int>& counts,
                                           double probability, double capacity)>;

struct CapacityOptions {
  unsigned threads = 0;                      // 0 = hardware concurrency
  std::uint64_t state_budget = 1ULL << 22;   // exact-mode limit on |S|
  StateRecordSink per_state;                 // optional
};

struct CapacityReport {
  CapacityMode mode = CapacityMode::exact;
  double value = 0.0;                   // exact value, lower bound, or sample mean
  std::optional<double> lower;          // exact / truncated
  std::optional<double> upper;          // exact / truncated
  std::optional<double> covered_probability;
  double full_state_capacity = 0.0;
  std::uint64_t states_evaluated = 0;
  std::uint64_t state_space_size = 0;
  std::optional<double> standard_error;  // sampled
  std::optional<std::uint64_t> seed;    // sampled
  double wall_seconds = 0.0;
};

/// Sum over every state of P_S * C_S. Throws GuardError when the state
/// space exceeds options.state_budget.
CapacityReport exact_capacity(const Topology& t, const CapacityOptions& options = {});

/// Evaluates the k most likely states; the remaining probability mass is
/// bounded by [0, full-state capacity].
CapacityReport truncated_capacity(const Topology& t, std::uint64_t k,
                                  const CapacityOptions& options = {});

/// Plain Monte Carlo over i.i.d. states; sample i uses RNG stream (seed, i).
CapacityReport sampled_capacity(const Topology& t, std::uint64_t samples, std::uint64_t seed,
                                const CapacityOptions& options = {});

/// Capacity of the state with every link at full multiplex capacity.
double full_state_capacity(const Topology& t);

unsigned resolve_threads(unsigned requested);

// Neumaier compensated summation.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double x);
  void add(const CompensatedSum& other) {
    add(other.sum);
    add(other.compensation);
  }
  double value() const { return sum + compensation; }
};

}  // namespace entcap
