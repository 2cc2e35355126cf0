#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entcap/errors.hpp"

namespace entcap {

enum class NodeRole { source, sink, internal };

struct NodeSpec {
  std::string id;
  double q = 1.0;  // swap success probability; fixed to 1 for source and sink
  NodeRole role = NodeRole::internal;
  std::string label;  // optional display name, not used by any computation

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct LinkSpec {
  std::string u;
  std::string v;
  std::optional<double> length_km;
  double p = 0.0;  // per-pair generation probability (derived when length_km is set)
  int c = 1;       // multiplex capacity
  bool derived_p = false;  // p computed from length_km rather than given

  // "u-v"; canonical topologies have u < v.
  std::string name() const { return u + "-" + v; }
  bool connects(std::string_view a, std::string_view b) const {
    return (u == a && v == b) || (u == b && v == a);
  }

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct LossConstants {
  double c_eff = 0.9;  // non-fiber loss pre-factor
  double beta = 0.2;   // fiber attenuation, dB/km

  friend bool operator==(const LossConstants&, const LossConstants&) = default;
};

// Undirected physical network with a designated source/sink pair.
//
// Nodes are kept sorted by id and links by their ordered endpoint pair, so
// link indices give the deterministic iteration order used by state
// enumeration.
struct Topology {
  std::string name;
  std::string description;
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  std::string source;
  std::string sink;
  LossConstants constants;

  std::optional<std::size_t> find_node(std::string_view id) const;
  std::optional<std::size_t> find_link(std::string_view a, std::string_view b) const;
  const NodeSpec& node(std::string_view id) const;  // throws ValidationError

  // Sorts nodes by id, orients every link with u < v and sorts links by
  // (u, v), then assigns roles. Idempotent.
  void canonicalize();

  // Same network with the source and sink exchanged.
  Topology with_endpoints_swapped() const;

  friend bool operator==(const Topology&, const Topology&) = default;
};

// Largest allowed gap between a tabulated p and the one derived from length.
inline constexpr double kTabulatedProbabilityTolerance = 5e-5;

/// Fiber-loss success probability c_eff * 10^(-0.1 * beta * L), clamped
/// to [0, 1]. Throws ValidationError on negative or non-finite length.
double derive_link_probability(double length_km, const LossConstants& constants = {});

/// Parses and validates a topology document (JSON). Link probabilities given
/// by length are resolved. Throws ValidationError listing every problem with
/// its field path.
Topology load_topology(std::string_view document);
Topology load_topology_file(const std::string& path);

/// Canonical JSON serialization; load_topology(serialize_topology(t)) == t.
std::string serialize_topology(const Topology& topology);

/// One diagnostic per violated invariant; empty iff the topology is valid.
std::vector<Diagnostic> validate_topology(const Topology& topology);

/// 64-bit FNV-1a over the canonical serialization, as 16 hex digits.
std::string topology_digest(const Topology& topology);

}  // namespace entcap
