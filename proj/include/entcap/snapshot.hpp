#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "entcap/model.hpp"

namespace entcap {

// Realized entangled-pair count per link, indexed like Topology::links.
struct SnapshotState {
  std::vector<int> counts;

  friend bool operator==(const SnapshotState&, const SnapshotState&) = default;
};

SnapshotState empty_state(const Topology& topology);
SnapshotState full_state(const Topology& topology);

/// Parses "link=count,..." against the topology's links. A bare link name
/// means count 1, "full" means every link at capacity, and an empty string
/// is the empty state. Links may be named in either orientation ("s-1" or
/// "1-s").
SnapshotState parse_state(const Topology& topology, std::string_view spec);
std::string format_state(const SnapshotState& state);  // "2;0;1;..."

/// Binomial product probability of a state. Throws ValidationError when a
/// count exceeds its link capacity or the state has the wrong size.
double state_probability(const Topology& topology, const SnapshotState& state);

/// Mixed-radix view of the product state space ∏_l {0..c_l}. Link 0 is the
/// least significant digit. Per-link pmf tables are precomputed so that
/// chunks of the index range can be walked independently.
class StateSpace {
 public:
  explicit StateSpace(const Topology& topology);

  std::size_t num_links() const { return radix_.size(); }
  // Number of states, saturating at UINT64_MAX.
  std::uint64_t size() const { return size_; }
  bool size_overflowed() const { return overflow_; }

  int capacity(std::size_t link) const { return radix_[link] - 1; }
  double pmf(std::size_t link, int count) const { return pmf_[link][count]; }

  SnapshotState decode(std::uint64_t index) const;
  std::uint64_t encode(const SnapshotState& state) const;
  double probability(const std::vector<int>& counts) const;

  // Sequential walk over [begin, end). The current state is always
  // re-derivable from index().
  class Cursor {
   public:
    std::uint64_t index() const { return index_; }
    const std::vector<int>& counts() const { return counts_; }
    double probability() const { return space_->probability(counts_); }
    bool done() const { return index_ >= end_; }
    void advance();

   private:
    friend class StateSpace;
    const StateSpace* space_ = nullptr;
    std::uint64_t index_ = 0;
    std::uint64_t end_ = 0;
    std::vector<int> counts_;
  };

  Cursor cursor(std::uint64_t begin, std::uint64_t end) const;

 private:
  std::vector<int> radix_;
  std::vector<std::vector<double>> pmf_;
  std::uint64_t size_ = 1;
  bool overflow_ = false;
};

/// Streams every state with its probability in mixed-radix order. The
/// callback receives (index, state, probability).
template <typename Callback>
void enumerate_states(const Topology& topology, Callback&& callback) {
  StateSpace space(topology);
  SnapshotState state;
  for (auto cur = space.cursor(0, space.size()); !cur.done(); cur.advance()) {
    state.counts = cur.counts();
    callback(cur.index(), static_cast<const SnapshotState&>(state), cur.probability());
  }
}

/// Splits every link holding two or more pairs into one two-hop route per
/// pair through a fresh unit-gain node "<u>__<v>__k" (k = 1..count). Links
/// with count <= 1 are kept unchanged. The returned state has counts in
/// {0, 1} only.
std::pair<Topology, SnapshotState> to_unit_capacity(const Topology& topology,
                                                    const SnapshotState& state);

std::string splitter_id(const LinkSpec& link, int k);

// Unit-capacity directed snapshot. Nodes are in lexicographic id order.
struct Arc {
  std::size_t from;
  std::size_t to;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

class DirectedSnapshot {
 public:
  DirectedSnapshot() = default;
  DirectedSnapshot(std::vector<std::string> ids, std::vector<double> gains,
                   std::vector<Arc> arcs, std::string_view source, std::string_view sink);

  std::size_t num_nodes() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t node) const { return ids_[node]; }
  const std::vector<double>& gains() const { return gains_; }
  double gain(std::size_t node) const { return gains_[node]; }
  const std::vector<Arc>& arcs() const { return arcs_; }  // sorted, unique
  std::size_t source() const { return source_; }
  std::size_t sink() const { return sink_; }

  std::optional<std::size_t> find_node(std::string_view id) const;
  std::size_t node_index(std::string_view id) const;  // throws ValidationError
  bool has_arc(std::size_t from, std::size_t to) const;

  // Number of undirected adjacencies underlying the arcs.
  std::size_t num_adjacencies() const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> gains_;
  std::vector<Arc> arcs_;
  std::size_t source_ = 0;
  std::size_t sink_ = 0;
};

/// Directed graph of a unit-count state: internal-internal edges become both
/// arcs, edges at the source only leave it and edges at the sink only enter
/// it. Throws ValidationError on a count above 1.
DirectedSnapshot to_directed(const Topology& topology, const SnapshotState& state);

/// to_unit_capacity followed by to_directed.
DirectedSnapshot directed_snapshot(const Topology& topology, const SnapshotState& state);

// Per-state CSV export.
void write_state_csv_header(std::ostream& out);
void write_state_csv_row(std::ostream& out, std::uint64_t index, const std::vector<int>& counts,
                         double probability, double capacity);

}  // namespace entcap
