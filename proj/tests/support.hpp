#pragma once

// Shared builders for the test binaries.

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "entcap/model.hpp"
#include "entcap/rng.hpp"
#include "entcap/snapshot.hpp"

namespace entcap::test {

struct L {
  std::string u, v;
  double p = 1.0;
  int c = 1;
};

// Source "s", sink "t"; every other listed node is internal.
inline Topology build(const std::vector<std::pair<std::string, double>>& internal,
                      const std::vector<L>& links) {
  Topology t;
  t.name = "test";
  t.source = "s";
  t.sink = "t";
  t.nodes.push_back({"s", 1.0, NodeRole::source, ""});
  t.nodes.push_back({"t", 1.0, NodeRole::sink, ""});
  for (const auto& [id, q] : internal) t.nodes.push_back({id, q, NodeRole::internal, ""});
  for (const auto& l : links) {
    LinkSpec spec;
    spec.u = l.u;
    spec.v = l.v;
    spec.p = l.p;
    spec.c = l.c;
    t.links.push_back(spec);
  }
  t.canonicalize();
  return t;
}

struct Instance {
  Topology topology;
  SnapshotState state;
};

// Random network with at most 6 nodes and 8 links, random multiplex
// capacities up to `max_c`, random gains in (0, 1] (some exactly 1) and a
// random state.
inline Instance random_instance(std::uint64_t seed, std::uint64_t index, bool unit_gains,
                                int max_c = 2) {
  CounterRng rng(seed, index);
  auto below = [&](std::uint64_t n) { return static_cast<int>(rng() % n); };
  const int internal = below(5);  // 0..4
  std::vector<std::pair<std::string, double>> nodes;
  for (int i = 1; i <= internal; ++i) {
    double q = 1.0;
    if (!unit_gains && below(5) != 0) q = 1.0 - rng.uniform() * 0.95;
    nodes.emplace_back(std::to_string(i), q);
  }
  std::vector<std::string> ids{"s", "t"};
  for (const auto& n : nodes) ids.push_back(n.first);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b) pairs.emplace_back(ids[a], ids[b]);
  // Fisher-Yates prefix.
  for (std::size_t i = pairs.size(); i > 1; --i) std::swap(pairs[i - 1], pairs[below(i)]);
  const int num_links = 1 + below(std::min<std::uint64_t>(8, pairs.size()));
  std::vector<L> links;
  for (int i = 0; i < num_links; ++i) {
    links.push_back({pairs[i].first, pairs[i].second, 0.2 + 0.8 * rng.uniform(), 1 + below(max_c)});
  }
  Instance out{build(nodes, links), {}};
  for (const auto& l : out.topology.links) out.state.counts.push_back(below(l.c + 1));
  return out;
}

}  // namespace entcap::test
