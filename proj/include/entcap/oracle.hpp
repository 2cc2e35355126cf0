#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "entcap/snapshot.hpp"

namespace entcap {

// Exhaustive reference for snapshot capacity. Deliberately naive: all simple
// s-t paths are listed, then every combination of pairwise edge-disjoint
// paths is visited.

struct OracleOptions {
  // Refuse instances with more realized links than this (see oracle_size).
  std::size_t max_links = 20;
  // Visit only maximal path sets (no further disjoint path can be added).
  bool maximal_only = true;
};

struct PathSet {
  std::vector<std::vector<std::size_t>> paths;  // node indices, s ... t
  double value = 0.0;
};

/// Realized links of the snapshot, counting a chain through unit-gain relay
/// nodes (degree 2) as one link.
std::size_t oracle_size(const DirectedSnapshot& g);

/// Every simple s-t path following arcs, in lexicographic node order.
std::vector<std::vector<std::size_t>> enumerate_simple_paths(const DirectedSnapshot& g);

/// Visits each edge-disjoint path set exactly once. Throws GuardError above
/// the size cap.
void enumerate_path_sets(const DirectedSnapshot& g, const std::function<void(const PathSet&)>& visit,
                         const OracleOptions& options = {});

/// First path set of maximum value.
PathSet best_path_set(const DirectedSnapshot& g, const OracleOptions& options = {});

/// Maximum value over all edge-disjoint path sets.
double brute_force_capacity(const DirectedSnapshot& g, const OracleOptions& options = {});

}  // namespace entcap
