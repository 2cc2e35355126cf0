#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "entcap/flowcheck.hpp"
#include "entcap/model.hpp"
#include "entcap/snapshot.hpp"

namespace entcap {

// Undirected multigraph searched by the snapshot solver. A link stands for
// `multiplicity` interchangeable unit routes between a and b; each route is
// either the direct arc pair or a chain of unit-gain relay nodes of the
// originating DirectedSnapshot (a "lane").
class LinkGraph {
 public:
  struct Link {
    int a = 0;
    int b = 0;
    bool forward = false;   // a -> b allowed
    bool backward = false;  // b -> a allowed
    int multiplicity = 0;
    std::vector<std::vector<std::size_t>> lanes;  // interior nodes, oriented a -> b
  };
  struct Move {
    int link;
    int to;
  };

  // Contracts every non-terminal node of gain exactly 1 and exactly two
  // unit-route neighbors into a lane of the link joining those neighbors.
  static LinkGraph from_directed(const DirectedSnapshot& g);

  // One link per physical link with multiplicity 0; set_counts() loads a
  // state. Equivalent to from_directed(directed_snapshot(t, state)).
  static LinkGraph from_topology(const Topology& t);
  void set_counts(const std::vector<int>& counts);

  int num_nodes() const { return static_cast<int>(gain_.size()); }
  int source() const { return source_; }
  int sink() const { return sink_; }
  double gain(int node) const { return gain_[node]; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Move>& moves(int node) const { return moves_[node]; }
  const std::vector<int>& incident(int node) const { return incident_[node]; }

 private:
  void build_adjacency();

  std::vector<double> gain_;
  std::vector<Link> links_;
  std::vector<std::vector<Move>> moves_;
  std::vector<std::vector<int>> incident_;
  int source_ = 0;
  int sink_ = 0;
};

struct SolverStats {
  std::uint64_t nodes_explored = 0;
  double wall_seconds = 0.0;
};

struct SnapshotSolution {
  double objective = 0.0;
  std::vector<DeliveredPath> paths;  // ordered by first hop out of the source
  FlowAssignment assignment;
  SolverStats stats;
};

/// Exact snapshot capacity: the maximum over sets of edge-disjoint simple
/// s-t paths of the summed path gains, with a certifying assignment.
SnapshotSolution solve_snapshot(const DirectedSnapshot& g);

/// Maximum number of arc-disjoint s-t paths (unit-capacity max-flow).
int max_disjoint_paths(const DirectedSnapshot& g);

/// Reusable value-only solver over the states of one topology. Not
/// thread-safe; use one instance per worker.
class SnapshotSolver {
 public:
  explicit SnapshotSolver(const Topology& t);
  ~SnapshotSolver();
  SnapshotSolver(SnapshotSolver&&) noexcept;
  SnapshotSolver& operator=(SnapshotSolver&&) noexcept;

  double capacity(const std::vector<int>& counts);
  std::uint64_t nodes_explored() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace entcap
