#pragma once

#include <cstdint>
#include <functional>

#include "entcap/model.hpp"

namespace entcap {

struct SimConfig {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;  // 0 = hardware concurrency
  // Optional per-trial hook, called in trial order.
  std::function<void(std::uint64_t trial, int delivered)> per_trial;
};

struct SimResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

/// Local-knowledge greedy swapping baseline. Each trial samples a state,
/// lets every internal node pair its live link ends by hop distance to the
/// source and sink, performs the swaps, and counts the end-to-end chains
/// that survive. Trial i draws from RNG stream (seed, i).
SimResult simulate_local_knowledge(const Topology& t, const SimConfig& cfg);

// Hop distances on the full physical topology; unreachable nodes get -1.
std::vector<int> hop_distances(const Topology& t, std::size_t from);

}  // namespace entcap
